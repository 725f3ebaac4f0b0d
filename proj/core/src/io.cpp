#include "dstbc/io.hpp"

#include <fstream>

namespace dstbc {
namespace {

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& doc, int rows, int cols) {
  if (!doc.is_array() || static_cast<int>(doc.size()) != rows)
    throw ParameterError("weight matrix must have " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = doc[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ParameterError("weight matrix rows must have " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ParameterError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

template <class T>
T get_as(const Json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("field '") + key + "': " + e.what());
  }
}

Json vector_to_json(const RVector& v) { return Json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

Json design_to_json(const LinearDesign& design) {
  Json weights = Json::array();
  for (int i = 0; i < design.K(); ++i) weights.push_back(matrix_to_json(design.weight(i)));
  return {{"T", design.T()}, {"N", design.N()}, {"K", design.K()}, {"weights", std::move(weights)}};
}

LinearDesign design_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParameterError("design document must be a JSON object");
  const int T = get_as<int>(doc, "T");
  const int N = get_as<int>(doc, "N");
  const int K = get_as<int>(doc, "K");
  const Json& weights = doc.at("weights");
  if (!weights.is_array() || static_cast<int>(weights.size()) != K)
    throw ParameterError("design must list exactly K = " + std::to_string(K) + " weight matrices");
  std::vector<CMatrix> out;
  for (const auto& w : weights) out.push_back(matrix_from_json(w, T, N));
  return LinearDesign(T, N, std::move(out));
}

Json code_to_json(const DstbcCode& code) {
  Json doc = design_to_json(code.design);
  Json groups = Json::array();
  for (const auto& g : code.grouping.groups) {
    Json one = Json::array();
    for (int i : g) one.push_back(i + 1);
    groups.push_back(std::move(one));
  }
  doc["grouping"] = std::move(groups);
  if (code.relay_form) {
    doc["T1"] = code.relay_form->T1;
    Json s = Json::array();
    for (int j : code.relay_form->S()) s.push_back(j + 1);
    doc["S"] = std::move(s);
  }
  return doc;
}

DstbcCode code_from_json(const Json& doc) {
  DstbcCode code;
  code.design = design_from_json(doc);
  if (doc.contains("grouping")) {
    const Json& groups = doc.at("grouping");
    if (!groups.is_array()) throw ParameterError("grouping must be an array of index arrays");
    for (const auto& g : groups) {
      std::vector<int> one;
      for (const auto& i : g) {
        if (!i.is_number_integer()) throw ParameterError("grouping indices must be integers");
        one.push_back(i.get<int>() - 1);
      }
      code.grouping.groups.push_back(std::move(one));
    }
  } else {
    code.grouping = GroupingScheme::singletons(code.K());
  }
  code.grouping.validate(code.K());
  try {
    code.relay_form = extract_relay_form(code.design);
  } catch (const StructuralError&) {
    code.relay_form.reset();
  }
  attach_signal_sets(code, 2);
  return code;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(path + ": " + e.what());
  }
}

DstbcCode load_code_file(const std::string& path) { return code_from_json(read_json_file(path)); }

Json report_to_json(const CriterionReport& report) {
  Json doc;
  doc["criterion"] = to_string(report.criterion);
  doc["passed"] = report.passed;
  doc["samples_tested"] = report.samples_tested;
  doc["min_singular_value"] = report.min_singular_value;
  doc["target_rank"] = report.target_rank;
  if (report.witness) {
    const Witness& w = *report.witness;
    doc["witness"] = {{"k", w.k < 0 ? Json(nullptr) : Json(w.k + 1)},
                      {"a_k", vector_to_json(w.a_k)},
                      {"u", vector_to_json(w.u)}};
  } else {
    doc["witness"] = nullptr;
  }
  doc["analytic_certificate"] = report.analytic_certificate ? Json(*report.analytic_certificate) : Json(nullptr);
  if (!report.certificate_note.empty()) doc["certificate_note"] = report.certificate_note;
  doc["differences_checked"] = report.differences_checked;
  doc["differences_available"] = report.differences_available;
  return doc;
}

ExperimentConfig config_from_json(const Json& doc, ExperimentConfig base) {
  if (!doc.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key == "preset") {
      base.code.preset = get_as<std::string>(doc, "preset");
      base.code.design_file.clear();
    } else if (key == "design_file") {
      base.code.design_file = get_as<std::string>(doc, "design_file");
    } else if (key == "N") {
      base.code.params.N = get_as<int>(doc, "N");
    } else if (key == "lambda") {
      base.code.params.lambda = get_as<int>(doc, "lambda");
    } else if (key == "n") {
      base.code.params.n = get_as<int>(doc, "n");
    } else if (key == "pam") {
      base.code.pam_order = get_as<int>(doc, "pam");
    } else if (key == "N_D" || key == "nd") {
      base.receive_antennas = get_as<int>(doc, key.c_str());
    } else if (key == "decoder") {
      base.decoder = parse_decoder(get_as<std::string>(doc, "decoder"));
    } else if (key == "snr_grid_db") {
      base.snr_grid_db = get_as<std::vector<double>>(doc, "snr_grid_db");
    } else if (key == "max_trials") {
      base.max_trials = get_as<long>(doc, "max_trials");
    } else if (key == "max_bit_errors") {
      base.max_bit_errors = get_as<long>(doc, "max_bit_errors");
    } else if (key == "master_seed") {
      base.master_seed = get_as<std::uint64_t>(doc, "master_seed");
    } else if (key == "pi1") {
      base.pi1 = get_as<double>(doc, "pi1");
    } else if (key == "pi2") {
      base.pi2 = get_as<double>(doc, "pi2");
    } else if (key == "threads") {
      base.threads = get_as<int>(doc, "threads");
    } else {
      throw ParameterError("unknown config field '" + key + "'");
    }
  }
  return base;
}

}  // namespace dstbc
