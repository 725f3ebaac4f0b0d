#include "dstbc/construct.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace dstbc {
namespace {

constexpr double kStructTol = 1e-12;

bool is_zero(const CVector& v) { return v.cwiseAbs().maxCoeff() <= kStructTol; }

// Sign s in {+1, -1} with b = s * i * a, or 0 if no such sign exists.
// Both columns zero counts as compatible with either sign (returns 2).
int pairing_sign(const CVector& a, const CVector& b) {
  const bool a_zero = is_zero(a);
  const bool b_zero = is_zero(b);
  if (a_zero || b_zero) return (a_zero && b_zero) ? 2 : 0;
  const Complex i(0, 1);
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  if ((b - i * a).cwiseAbs().maxCoeff() <= kStructTol * scale) return 1;
  if ((b + i * a).cwiseAbs().maxCoeff() <= kStructTol * scale) return -1;
  return 0;
}

bool is_partner(const LinearDesign& d, int a, int b) {
  bool any_nonzero = false;
  for (int j = 0; j < d.N(); ++j) {
    const int s = pairing_sign(d.weight(a).col(j), d.weight(b).col(j));
    if (s == 0) return false;
    any_nonzero = any_nonzero || s != 2;
  }
  return any_nonzero;
}

}  // namespace

int GroupingScheme::max_group_size() const {
  std::size_t best = 0;
  for (const auto& g : groups) best = std::max(best, g.size());
  return static_cast<int>(best);
}

int GroupingScheme::symbol_count() const {
  std::size_t total = 0;
  for (const auto& g : groups) total += g.size();
  return static_cast<int>(total);
}

void GroupingScheme::validate(int total_symbols) const {
  std::vector<bool> seen(static_cast<std::size_t>(total_symbols), false);
  int covered = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw ParameterError("grouping contains an empty group");
    if (!std::is_sorted(g.begin(), g.end()) || std::adjacent_find(g.begin(), g.end()) != g.end())
      throw ParameterError("group indices must be strictly ascending");
    for (int idx : g) {
      if (idx < 0 || idx >= total_symbols)
        throw ParameterError("group index " + std::to_string(idx + 1) + " out of range");
      if (seen[static_cast<std::size_t>(idx)])
        throw ParameterError("symbol " + std::to_string(idx + 1) + " appears in two groups");
      seen[static_cast<std::size_t>(idx)] = true;
      ++covered;
    }
  }
  if (covered != total_symbols) throw ParameterError("grouping does not cover every symbol");
}

GroupingScheme GroupingScheme::singletons(int total_symbols) {
  GroupingScheme out;
  for (int i = 0; i < total_symbols; ++i) out.groups.push_back({i});
  return out;
}

std::vector<int> ConjugateLinearForm::S() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < conjugated.size(); ++j)
    if (conjugated[j]) out.push_back(static_cast<int>(j));
  return out;
}

CMatrix ConjugateLinearForm::effective_relay_matrix(int relay) const {
  const auto j = static_cast<std::size_t>(relay);
  return conjugated.at(j) ? CMatrix(B[j].conjugate()) : B[j];
}

int DstbcCode::T1() const {
  if (!relay_form) throw StructuralError("code has no relay form (design is not conjugate linear)");
  return relay_form->T1;
}

GroupingScheme grouping_eq5(int lambda, int cod_symbols, int n) {
  if (lambda < 1 || cod_symbols < 1 || n < 1)
    throw ParameterError("grouping_eq5: lambda, K' and n must be >= 1");
  GroupingScheme out;
  const int g = n * cod_symbols;
  for (int k = 0; k < g; ++k) {
    std::vector<int> group(static_cast<std::size_t>(lambda));
    std::iota(group.begin(), group.end(), k * lambda);
    out.groups.push_back(std::move(group));
  }
  return out;
}

DstbcCode build(int N, const CodProfile& cod, int lambda, int n) {
  const int n_prime = cod.cols();
  const int t_prime = cod.rows();
  const int k_prime = cod.symbols();
  if (N < 1 || N % n_prime != 0)
    throw ParameterError("N = " + std::to_string(N) + " is not a multiple of the COD width " +
                         std::to_string(n_prime));
  const int L = N / n_prime;
  if (lambda < 1 || lambda > L)
    throw ParameterError("lambda = " + std::to_string(lambda) + " must satisfy 1 <= lambda <= L = " +
                         std::to_string(L));
  if (n < 1) throw ParameterError("n must be >= 1");

  const int K = lambda * n * k_prime;
  const int T2 = (n + L - 1) * t_prime;
  std::vector<CMatrix> weights(static_cast<std::size_t>(K), CMatrix::Zero(T2, N));

  for (int m = 0; m < n; ++m) {
    for (int block_col = 0; block_col < L; ++block_col) {
      const int ell = block_col % lambda;
      const int block_row = m + block_col;
      for (int i = 0; i < k_prime; ++i) {
        const int symbol = lambda * k_prime * m + ell + lambda * i;
        weights[static_cast<std::size_t>(symbol)].block(block_row * t_prime, block_col * n_prime,
                                                        t_prime, n_prime) = cod.design.weight(i);
      }
    }
  }

  DstbcCode code{LinearDesign(T2, N, std::move(weights)), grouping_eq5(lambda, k_prime, n), {},
                 std::nullopt, CodeParams{N, L, lambda, n, cod}};
  code.relay_form = extract_relay_form(code.design);
  attach_signal_sets(code, 2);
  return code;
}

void attach_signal_sets(DstbcCode& code, int pam_order, const std::optional<RotationMatrix>& rotation) {
  code.group_sets.clear();
  for (const auto& g : code.grouping.groups) {
    const int dim = static_cast<int>(g.size());
    if (dim == 1) {
      code.group_sets.push_back(make_pam(pam_order));
    } else if (rotation && rotation->dim() == dim) {
      code.group_sets.push_back(make_rotated_lattice(pam_order, *rotation));
    } else if (rotation) {
      throw ParameterError("rotation dimension " + std::to_string(rotation->dim()) +
                           " does not match group size " + std::to_string(dim));
    } else {
      code.group_sets.push_back(make_rotated_lattice(pam_order, RotationMatrix::default_for(dim)));
    }
  }
}

ConjugateLinearForm extract_relay_form(const LinearDesign& design) {
  const int K = design.K();
  const int N = design.N();

  // Pair each symbol with the lowest-indexed compatible partner.
  std::vector<int> partner(static_cast<std::size_t>(K), -1);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < K; ++a) {
    if (partner[static_cast<std::size_t>(a)] >= 0) continue;
    for (int b = a + 1; b < K; ++b) {
      if (partner[static_cast<std::size_t>(b)] < 0 && is_partner(design, a, b)) {
        partner[static_cast<std::size_t>(a)] = b;
        partner[static_cast<std::size_t>(b)] = a;
        pairs.emplace_back(a, b);
        break;
      }
    }
    if (partner[static_cast<std::size_t>(a)] < 0)
      throw StructuralError("symbol " + std::to_string(a + 1) +
                            " has no conjugate-linear partner; design is not conjugate linear");
  }

  // Solve orientation(p) XOR conjugated(j) = [sign(p, j) == -1] over the
  // bipartite pair/column graph; the lowest column of each component is unconjugated.
  const int P = static_cast<int>(pairs.size());
  std::vector<std::vector<std::pair<int, int>>> column_edges(static_cast<std::size_t>(N));
  std::vector<std::vector<std::pair<int, int>>> pair_edges(static_cast<std::size_t>(P));
  for (int p = 0; p < P; ++p) {
    const auto [a, b] = pairs[static_cast<std::size_t>(p)];
    for (int j = 0; j < N; ++j) {
      const int s = pairing_sign(design.weight(a).col(j), design.weight(b).col(j));
      if (s == 2) continue;
      const int parity = s == -1 ? 1 : 0;
      column_edges[static_cast<std::size_t>(j)].emplace_back(p, parity);
      pair_edges[static_cast<std::size_t>(p)].emplace_back(j, parity);
    }
  }

  std::vector<int> col_state(static_cast<std::size_t>(N), -1);
  std::vector<int> pair_state(static_cast<std::size_t>(P), -1);
  for (int start = 0; start < N; ++start) {
    if (col_state[static_cast<std::size_t>(start)] >= 0) continue;
    col_state[static_cast<std::size_t>(start)] = 0;
    std::deque<std::pair<bool, int>> queue{{true, start}};
    while (!queue.empty()) {
      const auto [is_col, node] = queue.front();
      queue.pop_front();
      const auto& edges = is_col ? column_edges[static_cast<std::size_t>(node)]
                                 : pair_edges[static_cast<std::size_t>(node)];
      const int here = is_col ? col_state[static_cast<std::size_t>(node)]
                              : pair_state[static_cast<std::size_t>(node)];
      for (const auto& [other, parity] : edges) {
        auto& there = is_col ? pair_state[static_cast<std::size_t>(other)]
                             : col_state[static_cast<std::size_t>(other)];
        const int want = here ^ parity;
        if (there < 0) {
          there = want;
          queue.emplace_back(!is_col, other);
        } else if (there != want) {
          throw StructuralError("column " + std::to_string((is_col ? node : other) + 1) +
                                " mixes conjugated and unconjugated super-symbols");
        }
      }
    }
  }

  ConjugateLinearForm form;
  form.T1 = P;
  form.V = CMatrix::Zero(P, K);
  const Complex i(0, 1);
  for (int p = 0; p < P; ++p) {
    const auto [a, b] = pairs[static_cast<std::size_t>(p)];
    const double sigma = pair_state[static_cast<std::size_t>(p)] == 1 ? -1.0 : 1.0;
    form.V(p, a) = 1.0;
    form.V(p, b) = sigma * i;
  }
  form.conjugated.resize(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    const bool conj = col_state[static_cast<std::size_t>(j)] == 1;
    form.conjugated[static_cast<std::size_t>(j)] = conj;
    CMatrix B(design.T(), P);
    for (int p = 0; p < P; ++p) {
      const CVector col = design.weight(pairs[static_cast<std::size_t>(p)].first).col(j);
      B.col(p) = conj ? CVector(col.conjugate()) : col;
    }
    form.B.push_back(std::move(B));
  }

  // Exact algebraic check: each symbol's weight column equals its image through (V, B, S).
  for (int j = 0; j < N; ++j) {
    const CMatrix relay = form.effective_relay_matrix(j);
    for (int s = 0; s < K; ++s) {
      const CVector v = form.conjugated[static_cast<std::size_t>(j)]
                            ? CVector(form.V.col(s).conjugate())
                            : CVector(form.V.col(s));
      const CVector rebuilt = relay * v;
      if ((rebuilt - design.weight(s).col(j)).cwiseAbs().maxCoeff() > 1e-10)
        throw StructuralError("relay form does not reproduce column " + std::to_string(j + 1));
    }
  }
  return form;
}

Rational rate_cspcu(const DstbcCode& code) { return Rational(code.K(), 2 * (code.T1() + code.T2())); }

Rational bits_per_channel_use(const DstbcCode& code) {
  if (code.group_sets.size() != code.grouping.groups.size())
    throw ParameterError("bits_per_channel_use: signal sets not attached");
  std::int64_t bits = 0;
  for (const auto& set : code.group_sets) bits += set.bits_per_point();
  return Rational(bits, code.T1() + code.T2());
}

DstbcCode drop_relays(const DstbcCode& code, std::span<const int> relays) {
  const int N = code.N();
  std::vector<bool> drop(static_cast<std::size_t>(N), false);
  for (int r : relays) {
    if (r < 0 || r >= N) throw ParameterError("relay index " + std::to_string(r + 1) + " out of range");
    drop[static_cast<std::size_t>(r)] = true;
  }
  std::vector<int> keep;
  for (int j = 0; j < N; ++j)
    if (!drop[static_cast<std::size_t>(j)]) keep.push_back(j);
  if (keep.empty()) throw ParameterError("cannot drop every relay");
  if (static_cast<int>(keep.size()) == N) return code;

  std::vector<CMatrix> weights;
  for (const auto& w : code.design.weights()) weights.emplace_back(w(Eigen::all, keep));
  DstbcCode out{LinearDesign(code.T2(), static_cast<int>(keep.size()), std::move(weights)),
                code.grouping, code.group_sets, std::nullopt, std::nullopt};
  if (code.relay_form) {
    ConjugateLinearForm form;
    form.T1 = code.relay_form->T1;
    form.V = code.relay_form->V;
    for (int j : keep) {
      form.B.push_back(code.relay_form->B[static_cast<std::size_t>(j)]);
      form.conjugated.push_back(code.relay_form->conjugated[static_cast<std::size_t>(j)]);
    }
    out.relay_form = std::move(form);
  }
  return out;
}

std::vector<std::string> preset_names() {
  return {"example1", "example2", "toeplitz", "example2_full", "alamouti_half", "single_complex", "alamouti"};
}

DstbcCode preset(const std::string& name, const PresetParams& p) {
  if (name == "example1") return build(p.N, cod_alamouti(), p.lambda, p.n);
  if (name == "example2") return build(p.N, cod_trivial(), p.lambda, p.n);
  if (name == "toeplitz") return build(p.N, cod_trivial(), 1, p.n);
  if (name == "example2_full") return build(p.N, cod_trivial(), p.N, p.n);
  if (name == "alamouti_half") {
    if (p.N % 2 != 0) throw ParameterError("alamouti_half preset needs an even N");
    return build(p.N, cod_alamouti(), p.N / 2, p.n);
  }
  if (name == "single_complex") {
    if (p.N == 2) return build(2, cod_trivial(), 2, 2);
    if (p.N == 4) return build(4, cod_alamouti(), 2, 2);
    throw ParameterError("single_complex preset exists only for N = 2 or N = 4");
  }
  if (name == "alamouti") return build(2, cod_alamouti(), 1, 1);
  throw ParameterError("unknown preset '" + name + "'");
}

bool layer_structure_holds(const DstbcCode& code) {
  if (!code.params) return false;
  const CodeParams& p = *code.params;
  const int tp = p.T_prime();
  const int np = p.N_prime();
  const int kp = p.K_prime();
  const int block_rows = p.n + p.L - 1;
  if (code.T2() != block_rows * tp || code.N() != p.L * np || code.K() != p.lambda * p.n * kp)
    return false;

  auto block_nonzero = [&](int symbol, int r, int c) {
    return code.design.weight(symbol).block(r * tp, c * np, tp, np).cwiseAbs().maxCoeff() > kStructTol;
  };

  for (int k = 0; k < code.grouping.group_count(); ++k) {
    const int layer = k / kp;
    const auto& group = code.grouping.groups[static_cast<std::size_t>(k)];
    for (int symbol : group) {
      for (int r = 0; r < block_rows; ++r)
        for (int c = 0; c < p.L; ++c)
          if (block_nonzero(symbol, r, c) && r - c != layer) return false;
    }
    for (int c = 0; c < p.L; ++c) {
      const bool carried = std::any_of(group.begin(), group.end(),
                                       [&](int s) { return block_nonzero(s, layer + c, c); });
      if (!carried) return false;
    }
  }
  return true;
}

}  // namespace dstbc
