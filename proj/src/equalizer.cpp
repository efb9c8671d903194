#include "semeq/equalizer.hpp"

#include <limits>
#include <string>

#include "semeq/errors.hpp"
#include "semeq/jsonio.hpp"

namespace semeq {

Correspondence Correspondence::identity() {
  Correspondence k;
  for (int i = 0; i < kNumActions; ++i) {
    k.targets[static_cast<std::size_t>(i)] = {i};
  }
  return k;
}

void Correspondence::validate() const {
  for (const auto& image : targets) {
    for (const int j : image) {
      if (j < 0 || j >= kNumActions) {
        throw Error("correspondence maps to invalid target atom " +
                    std::to_string(j));
      }
    }
  }
}

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::None: return "none";
    case Policy::Sem: return "sem";
    case Policy::Eff: return "eff";
  }
  return "?";
}

EqualizerState::EqualizerState(TransferTensor tensor, Codebook codebook,
                               Correspondence kappa, QTable qtable,
                               Language source_lang, Policy policy)
    : tensor_(std::move(tensor)),
      codebook_(std::move(codebook)),
      kappa_(std::move(kappa)),
      qtable_(std::move(qtable)),
      source_lang_(std::move(source_lang)),
      policy_(policy) {
  kappa_.validate();
  if (tensor_.n_maps != codebook_.size()) {
    throw ProvenanceError("tensor holds " + std::to_string(tensor_.n_maps) +
                          " maps but codebook holds " +
                          std::to_string(codebook_.size()));
  }
  if (tensor_.codebook_fp != codebook_fingerprint(codebook_)) {
    throw ProvenanceError("tensor was computed for a different codebook");
  }
  const std::uint64_t lang_fp = language_fingerprint(source_lang_);
  if (tensor_.source_lang_fp != lang_fp) {
    throw ProvenanceError("tensor was computed for a different source language");
  }
  if (codebook_.source_lang_fp != lang_fp) {
    throw ProvenanceError("codebook was fitted for a different source language");
  }
  if (!(qtable_.grid() == source_lang_.grid)) {
    throw ProvenanceError("qtable grid differs from language grid");
  }

  const Partition source_partition(source_lang_);
  const int n_obs = num_observations(source_lang_.grid);
  atom_of_obs_.resize(static_cast<std::size_t>(n_obs));
  for (int i = 0; i < n_obs; ++i) {
    const Observation obs = observation_from_index(i, source_lang_.grid);
    atom_of_obs_[static_cast<std::size_t>(i)] =
        source_partition.atom_of(encode(source_lang_, obs));
  }

  // The semantic score depends on the observation only through its source
  // atom, so the selection collapses to one choice per atom.
  for (int i = 0; i < kNumActions; ++i) {
    if (!tensor_.source_valid[static_cast<std::size_t>(i)]) {
      sem_choice_[static_cast<std::size_t>(i)] = -1;
      continue;
    }
    int best = 0;
    double best_score = -1.0;
    for (int k = 0; k < tensor_.n_maps; ++k) {
      double score = 0.0;
      for (const int j : kappa_.targets[static_cast<std::size_t>(i)]) {
        score += tensor_.zeta_at(i, j, k);
      }
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
    sem_choice_[static_cast<std::size_t>(i)] = best;
  }
}

int EqualizerState::source_atom(const Observation& obs) const {
  return atom_of_obs_[static_cast<std::size_t>(
      observation_index(obs, source_lang_.grid))];
}

namespace {

int valid_source_atom(const EqualizerState& state, const Observation& obs) {
  const int i = state.source_atom(obs);
  if (!state.tensor().source_valid[static_cast<std::size_t>(i)]) {
    throw EmptyAtomError("observation encodes into empty source atom " +
                         std::to_string(i));
  }
  return i;
}

}  // namespace

int select_sem(const EqualizerState& state, const Observation& obs) {
  if (state.policy() != Policy::Sem) {
    throw Error("select_sem called on a non-sem equalizer");
  }
  return state.sem_choice_[static_cast<std::size_t>(
      valid_source_atom(state, obs))];
}

int select_eff(const EqualizerState& state, const Observation& obs) {
  if (state.policy() != Policy::Eff) {
    throw Error("select_eff called on a non-eff equalizer");
  }
  const int i = valid_source_atom(state, obs);
  const auto& q = state.qtable().row(observation_index(obs, state.qtable().grid()));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < state.tensor().n_maps; ++k) {
    double score = 0.0;
    for (int j = 0; j < kNumActions; ++j) {
      score += state.tensor().zeta_at(i, j, k) * q[static_cast<std::size_t>(j)];
    }
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

Vec2 equalize(const EqualizerState& state, const Observation& obs,
              const Vec2& symbol) {
  switch (state.policy()) {
    case Policy::None:
      return symbol;
    case Policy::Sem:
      return apply(state.codebook().maps[static_cast<std::size_t>(
                       select_sem(state, obs))],
                   symbol);
    case Policy::Eff:
      return apply(state.codebook().maps[static_cast<std::size_t>(
                       select_eff(state, obs))],
                   symbol);
  }
  throw Error("unreachable policy");
}

}  // namespace semeq
