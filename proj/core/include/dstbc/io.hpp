#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dstbc/construct.hpp"
#include "dstbc/diversity.hpp"
#include "dstbc/harness.hpp"

namespace dstbc {

using Json = nlohmann::json;

/// {T, N, K, weights}: each weight is an array of rows, each entry a [re, im] pair.
Json design_to_json(const LinearDesign& design);
LinearDesign design_from_json(const Json& doc);

/// Design document plus 1-based `grouping`, and `T1` / `S` when a relay form exists.
Json code_to_json(const DstbcCode& code);

/// Accepts a design or code document. The grouping defaults to singletons; the
/// relay form is extracted when the design is conjugate linear and left empty
/// otherwise. Signal sets default to 2-PAM based lattices.
DstbcCode code_from_json(const Json& doc);
DstbcCode load_code_file(const std::string& path);

Json read_json_file(const std::string& path);

/// Report fields with 1-based witness group index; `k` is null for ZF witnesses.
Json report_to_json(const CriterionReport& report);

/// Applies the keys present in a flat config document on top of `base`.
/// Unknown keys and ill-typed values throw ParameterError.
ExperimentConfig config_from_json(const Json& doc, ExperimentConfig base = {});

}  // namespace dstbc
