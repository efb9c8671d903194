#pragma once

#include <array>
#include <vector>

#include "semeq/codebook.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/language.hpp"
#include "semeq/semantics.hpp"

namespace semeq {

/// kappa: source atom index -> set of corresponding target atom indices.
/// Atoms inherit the shared action order, so the default is i -> {i}.
struct Correspondence {
  std::array<std::vector<int>, kNumActions> targets;

  static Correspondence identity();
  void validate() const;
};

enum class Policy { None, Sem, Eff };

const char* policy_name(Policy p);

/// Immutable bundle for codebook operation: the transfer tensor, the
/// codebook it was computed for, the atom correspondence, the task value
/// table and the transmitting language. Construction validates the
/// provenance chain and precomputes the per-source-atom caches.
class EqualizerState {
 public:
  EqualizerState(TransferTensor tensor, Codebook codebook, Correspondence kappa,
                 QTable qtable, Language source_lang, Policy policy);

  Policy policy() const { return policy_; }
  const Codebook& codebook() const { return codebook_; }
  const TransferTensor& tensor() const { return tensor_; }
  const QTable& qtable() const { return qtable_; }

  /// Source atom of encode(source_lang, obs), from the precomputed cache.
  int source_atom(const Observation& obs) const;

 private:
  friend int select_sem(const EqualizerState&, const Observation&);
  friend int select_eff(const EqualizerState&, const Observation&);

  TransferTensor tensor_;
  Codebook codebook_;
  Correspondence kappa_;
  QTable qtable_;
  Language source_lang_;
  Policy policy_;
  std::vector<int> atom_of_obs_;               // per observation index
  std::array<int, kNumActions> sem_choice_{};  // per source atom, -1 invalid
};

/// Semantic policy: the map maximizing transferred mass into kappa(i*) for
/// the source atom i* of the observation; ties to the lowest map id. Throws
/// EmptyAtomError when i* has an invalid tensor row.
int select_sem(const EqualizerState& state, const Observation& obs);

/// Effectiveness policy: the map maximizing sum_j zeta_{i*->j} q(a_j, obs);
/// ties to the lowest map id.
int select_eff(const EqualizerState& state, const Observation& obs);

/// Applies the selected map to the transmitted symbol (before the channel).
/// Policy None passes the symbol through unchanged.
Vec2 equalize(const EqualizerState& state, const Observation& obs,
              const Vec2& symbol);

}  // namespace semeq
