#include "dstbc/decode.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace dstbc {
namespace {

constexpr double kRankTol = 1e-10;

// Orthonormal basis of col(M) at the given relative numerical rank tolerance.
RMatrix range_basis(const RMatrix& M, double tol) {
  if (M.cols() == 0 || M.rows() == 0) return RMatrix(M.rows(), 0);
  Eigen::JacobiSVD<RMatrix> svd(M, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return RMatrix(M.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > tol * s[0]) ++rank;
  return svd.matrixU().leftCols(rank);
}

// v - Q Q^T v, i.e. the projection of every column of v onto col(Q)^perp.
RMatrix project_out(const RMatrix& Q, const RMatrix& v) {
  if (Q.cols() == 0) return v;
  return v - Q * (Q.transpose() * v);
}

// basis * a for every candidate a of the set, as columns.
RMatrix candidate_images(const RMatrix& basis, const SignalSet& set) { return basis * set.points(); }

struct GroupChoice {
  int index = 0;
  double metric = 0.0;
};

// Lowest-index minimizer of ||target - images(:, c)||^2.
GroupChoice search_group(const RVector& target, const RMatrix& images) {
  GroupChoice best{0, std::numeric_limits<double>::infinity()};
  RVector scratch(target.size());
  for (Eigen::Index c = 0; c < images.cols(); ++c) {
    scratch.noalias() = target - images.col(c);
    const double metric = scratch.squaredNorm();
    if (metric < best.metric) best = {static_cast<int>(c), metric};
  }
  return best;
}

std::vector<int> indices_except(const GroupingScheme& grouping, int skip) {
  std::vector<int> out;
  for (int k = 0; k < grouping.group_count(); ++k)
    if (k != skip) {
      const auto& g = grouping.groups[static_cast<std::size_t>(k)];
      out.insert(out.end(), g.begin(), g.end());
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> indices_after(const GroupingScheme& grouping, int k) {
  std::vector<int> out;
  for (int l = k + 1; l < grouping.group_count(); ++l) {
    const auto& g = grouping.groups[static_cast<std::size_t>(l)];
    out.insert(out.end(), g.begin(), g.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void place(DecodeResult& result, const DecodeProblem& p, int k, const GroupChoice& choice) {
  const auto& group = p.grouping->groups[static_cast<std::size_t>(k)];
  const auto point = p.group_sets[static_cast<std::size_t>(k)].point(choice.index);
  for (std::size_t d = 0; d < group.size(); ++d) result.x_hat[group[d]] = point[static_cast<Eigen::Index>(d)];
  result.point_indices[static_cast<std::size_t>(k)] = choice.index;
  result.per_group_residuals[static_cast<std::size_t>(k)] = choice.metric;
}

DecodeResult empty_result(const DecodeProblem& p) {
  DecodeResult r;
  r.x_hat = RVector::Zero(p.G.cols());
  r.point_indices.assign(static_cast<std::size_t>(p.group_count()), 0);
  r.per_group_residuals.assign(static_cast<std::size_t>(p.group_count()), 0.0);
  return r;
}

// Interference-cancelling group decision shared by PIC and PIC-SIC.
GroupChoice decide_group(const DecodeProblem& p, int k, const RVector& observation,
                         std::span<const int> interference) {
  const auto& group = p.grouping->groups[static_cast<std::size_t>(k)];
  const RMatrix own = select_columns(p.G, group);
  const auto& set = p.group_sets[static_cast<std::size_t>(k)];
  if (interference.empty()) return search_group(observation, candidate_images(own, set));
  const RMatrix Q = range_basis(select_columns(p.G, interference), kRankTol);
  const RVector target = project_out(Q, observation);
  return search_group(target, candidate_images(project_out(Q, own), set));
}

struct Refinement {
  GroupingScheme grouping;
  std::vector<SignalSet> sets;
  std::vector<int> parent;  // original group of each singleton
};

// Splits every group into singletons; only valid for product signal sets.
Refinement singleton_refinement(const DecodeProblem& p) {
  Refinement out;
  for (int k = 0; k < p.group_count(); ++k) {
    const auto& group = p.grouping->groups[static_cast<std::size_t>(k)];
    const SignalSet& set = p.group_sets[static_cast<std::size_t>(k)];
    if (group.size() == 1) {
      out.grouping.groups.push_back(group);
      out.sets.push_back(set);
      out.parent.push_back(k);
      continue;
    }
    std::size_t product = 1;
    std::vector<std::vector<double>> coords(group.size());
    for (std::size_t d = 0; d < group.size(); ++d) {
      std::vector<double> values;
      for (int c = 0; c < set.size(); ++c) values.push_back(set.points()(static_cast<Eigen::Index>(d), c));
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end(),
                               [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                   values.end());
      product *= values.size();
      coords[d] = std::move(values);
    }
    if (product != static_cast<std::size_t>(set.size()))
      throw StructuralError("group " + std::to_string(k + 1) +
                            " has a non-separable signal set; ZF/ZF-SIC needs a product set");
    for (std::size_t d = 0; d < group.size(); ++d) {
      const auto count = static_cast<Eigen::Index>(coords[d].size());
      RMatrix pts(1, count);
      std::vector<std::uint32_t> labels(coords[d].size());
      for (Eigen::Index c = 0; c < count; ++c) {
        pts(0, c) = coords[d][static_cast<std::size_t>(c)];
        labels[static_cast<std::size_t>(c)] = static_cast<std::uint32_t>(c);
      }
      out.grouping.groups.push_back({group[d]});
      out.sets.emplace_back(std::move(pts), std::move(labels));
      out.parent.push_back(k);
    }
  }
  return out;
}

DecodeResult merge_refined(const DecodeProblem& p, const Refinement& refined, const DecodeResult& fine) {
  DecodeResult out = empty_result(p);
  out.x_hat = fine.x_hat;
  for (std::size_t s = 0; s < refined.parent.size(); ++s)
    out.per_group_residuals[static_cast<std::size_t>(refined.parent[s])] += fine.per_group_residuals[s];
  for (int k = 0; k < p.group_count(); ++k) {
    const auto& group = p.grouping->groups[static_cast<std::size_t>(k)];
    const SignalSet& set = p.group_sets[static_cast<std::size_t>(k)];
    RVector decided(static_cast<Eigen::Index>(group.size()));
    for (std::size_t d = 0; d < group.size(); ++d) decided[static_cast<Eigen::Index>(d)] = fine.x_hat[group[d]];
    int match = -1;
    for (int c = 0; c < set.size() && match < 0; ++c)
      if ((set.point(c) - decided).cwiseAbs().maxCoeff() <= 1e-12) match = c;
    if (match < 0) throw NumericalError("refined decision is not a point of the group's signal set");
    out.point_indices[static_cast<std::size_t>(k)] = match;
  }
  return out;
}

bool all_singletons(const DecodeProblem& p) { return p.grouping->max_group_size() == 1; }

}  // namespace

DecodeProblem::DecodeProblem(RMatrix G_, RVector y_, const GroupingScheme& grouping_,
                             std::span<const SignalSet> sets)
    : G(std::move(G_)), y(std::move(y_)), grouping(&grouping_), group_sets(sets) {
  if (G.rows() != y.size()) throw ParameterError("decode problem: G rows and y size differ");
  grouping_.validate(static_cast<int>(G.cols()));
  if (sets.size() != grouping_.groups.size())
    throw ParameterError("decode problem: one signal set per group is required");
  for (std::size_t k = 0; k < sets.size(); ++k)
    if (sets[k].dim() != static_cast<int>(grouping_.groups[k].size()))
      throw ParameterError("decode problem: signal set " + std::to_string(k + 1) +
                           " dimension does not match its group size");
}

RMatrix projector_complement(const RMatrix& M, double tol) {
  const RMatrix Q = range_basis(M, tol);
  return RMatrix::Identity(M.rows(), M.rows()) - Q * Q.transpose();
}

RMatrix select_columns(const RMatrix& G, std::span<const int> indices) {
  RMatrix out(G.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = G.col(indices[i]);
  return out;
}

DecodeResult pic_decode(const DecodeProblem& p) {
  DecodeResult result = empty_result(p);
  for (int k = 0; k < p.group_count(); ++k) {
    const auto interference = indices_except(*p.grouping, k);
    place(result, p, k, decide_group(p, k, p.y, interference));
  }
  return result;
}

DecodeResult pic_sic_decode(const DecodeProblem& p) {
  DecodeResult result = empty_result(p);
  RVector current = p.y;
  for (int k = 0; k < p.group_count(); ++k) {
    const auto interference = indices_after(*p.grouping, k);
    const GroupChoice choice = decide_group(p, k, current, interference);
    place(result, p, k, choice);
    const auto& group = p.grouping->groups[static_cast<std::size_t>(k)];
    current -= select_columns(p.G, group) * p.group_sets[static_cast<std::size_t>(k)].point(choice.index);
  }
  return result;
}

DecodeResult zf_decode(const DecodeProblem& p) {
  if (all_singletons(p)) return pic_decode(p);
  const Refinement refined = singleton_refinement(p);
  const DecodeProblem fine(p.G, p.y, refined.grouping, refined.sets);
  return merge_refined(p, refined, pic_decode(fine));
}

DecodeResult zf_sic_decode(const DecodeProblem& p) {
  if (all_singletons(p)) return pic_sic_decode(p);
  const Refinement refined = singleton_refinement(p);
  const DecodeProblem fine(p.G, p.y, refined.grouping, refined.sets);
  return merge_refined(p, refined, pic_sic_decode(fine));
}

DecodeResult ml_decode(const DecodeProblem& p, std::uint64_t cap) {
  const int g = p.group_count();
  std::uint64_t space = 1;
  for (const auto& set : p.group_sets) {
    space *= static_cast<std::uint64_t>(set.size());
    if (space > cap)
      throw ParameterError("ML search space exceeds the cap of " + std::to_string(cap) + " candidates");
  }

  std::vector<RMatrix> images;
  images.reserve(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k)
    images.push_back(candidate_images(select_columns(p.G, p.grouping->groups[static_cast<std::size_t>(k)]),
                                      p.group_sets[static_cast<std::size_t>(k)]));

  // Depth-first odometer; residual[k] = y - sum_{l<k} G_l a_l.
  std::vector<RVector> residual(static_cast<std::size_t>(g) + 1, RVector(p.y.size()));
  residual[0] = p.y;
  std::vector<int> digit(static_cast<std::size_t>(g), 0);
  std::vector<int> best_digit(static_cast<std::size_t>(g), 0);
  double best = std::numeric_limits<double>::infinity();

  int level = 0;
  while (level >= 0) {
    if (level == g) {
      const double metric = residual[static_cast<std::size_t>(g)].squaredNorm();
      if (metric < best) {
        best = metric;
        best_digit = digit;
      }
      --level;
      if (level >= 0) ++digit[static_cast<std::size_t>(level)];
      continue;
    }
    const auto ul = static_cast<std::size_t>(level);
    if (digit[ul] == static_cast<int>(images[ul].cols())) {
      digit[ul] = 0;
      --level;
      if (level >= 0) ++digit[static_cast<std::size_t>(level)];
      continue;
    }
    residual[ul + 1].noalias() = residual[ul] - images[ul].col(digit[ul]);
    ++level;
  }

  DecodeResult result = empty_result(p);
  for (int k = 0; k < g; ++k) place(result, p, k, {best_digit[static_cast<std::size_t>(k)], 0.0});
  result.per_group_residuals.assign(1, best);
  return result;
}

Decoder parse_decoder(const std::string& name) {
  if (name == "ml") return Decoder::ml;
  if (name == "pic") return Decoder::pic;
  if (name == "pic-sic") return Decoder::pic_sic;
  if (name == "zf") return Decoder::zf;
  if (name == "zf-sic") return Decoder::zf_sic;
  throw ParameterError("unknown decoder '" + name + "' (expected ml, pic, pic-sic, zf, zf-sic)");
}

std::string to_string(Decoder decoder) {
  switch (decoder) {
    case Decoder::ml: return "ml";
    case Decoder::pic: return "pic";
    case Decoder::pic_sic: return "pic-sic";
    case Decoder::zf: return "zf";
    case Decoder::zf_sic: return "zf-sic";
  }
  return "?";
}

DecodeResult decode(Decoder decoder, const DecodeProblem& problem) {
  switch (decoder) {
    case Decoder::ml: return ml_decode(problem);
    case Decoder::pic: return pic_decode(problem);
    case Decoder::pic_sic: return pic_sic_decode(problem);
    case Decoder::zf: return zf_decode(problem);
    case Decoder::zf_sic: return zf_sic_decode(problem);
  }
  throw ParameterError("unknown decoder");
}

double residual_norm(const DecodeProblem& p, const RVector& x_hat) { return (p.y - p.G * x_hat).norm(); }

}  // namespace dstbc
