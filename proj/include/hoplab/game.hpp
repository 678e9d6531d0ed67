#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/pathloss.hpp"
#include "hoplab/users.hpp"

namespace hoplab {

/// Exact fraction on int64 with overflow checks; abstract game instances are
/// evaluated in this type so table comparisons are exact.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac() = default;
  Frac(std::int64_t n) : num(n), den(1) {}  // NOLINT(runtime/explicit)
  Frac(std::int64_t n, std::int64_t d);

  static Frac parse(const std::string& text);

  Frac operator+(const Frac& o) const;
  Frac operator-(const Frac& o) const;
  Frac operator*(const Frac& o) const;
  Frac operator/(const Frac& o) const;
  bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Frac& o) const { return !(*this == o); }
  bool operator<(const Frac& o) const;
  bool operator<=(const Frac& o) const { return *this < o || *this == o; }
  bool operator>(const Frac& o) const { return o < *this; }
  bool operator>=(const Frac& o) const { return o <= *this; }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string to_string() const;
};

/// One pure strategy: fixed hop costs plus the relays the path uses.
template <class Cost>
struct Strategy {
  std::vector<Cost> hop_costs;
  std::vector<int> relays;  // global relay ids, one fewer than hops

  Cost fixed_cost() const {
    Cost total{};
    for (const Cost& c : hop_costs) total = total + c;
    return total;
  }
};

/// Unweighted atomic congestion game: per-player strategy sets with constant
/// hop costs and a linear per-relay congestion cost beta (m - 1).
template <class Cost>
struct GameInstance {
  int players = 0;
  int relay_ids = 0;  // relay id universe [0, relay_ids)
  Cost gamma{};
  Cost beta{};
  std::vector<std::vector<Strategy<Cost>>> strategies;

  std::int64_t profile_count() const {
    std::int64_t total = 1;
    for (const auto& s : strategies) {
      if (total > (std::int64_t{1} << 62) / static_cast<std::int64_t>(s.size()))
        return -1;
      total *= static_cast<std::int64_t>(s.size());
    }
    return total;
  }
};

template <class Cost>
struct ProfileCosts {
  std::vector<Cost> individual;  // C_i
  Cost total{};                  // C = gamma S + beta M
  Cost potential{};              // Phi = gamma sum hops + (beta/2) sum m(m-1)
};

using AbstractGame = GameInstance<Frac>;
using GeometricGame = GameInstance<double>;

struct GameBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loop-free strategy enumeration from a user cloud: paths through distinct
/// peers with at most k_max hops; hop costs gamma / SIR.
GeometricGame build_geometric_game(const UserConfiguration& users,
                                   const NetworkGeometry& geom,
                                   const PathLossModel& model);

/// Abstract instance from JSON:
/// {"players": n, "gamma": g, "beta": b,
///  "strategies": [[{"hops": [...], "relays": [...]}, ...], ...]}
/// Costs are integers or "p/q" strings.
AbstractGame abstract_game_from_json(const std::string& text);
std::string game_report_json(const AbstractGame& game,
                             const std::vector<std::vector<int>>& nash,
                             const std::vector<std::vector<int>>& optima,
                             bool non_selfish);

template <class Cost>
ProfileCosts<Cost> costs(const GameInstance<Cost>& game,
                         const std::vector<int>& profile);

/// Single-player best responses until a fixed point; ties keep the current
/// strategy, otherwise the lowest index wins. Returns a pure Nash profile.
template <class Cost>
std::vector<int> best_response_dynamics(const GameInstance<Cost>& game,
                                        std::vector<int> profile);

template <class Cost>
bool is_nash(const GameInstance<Cost>& game, const std::vector<int>& profile);

template <class Cost>
struct EquilibriaResult {
  std::vector<std::vector<int>> nash;
  std::vector<std::vector<int>> optima;
  Cost optimum_cost{};
  bool non_selfish = false;  // some optimum strictly beats every Nash cost
};

template <class Cost>
EquilibriaResult<Cost> equilibria_and_optima(
    const GameInstance<Cost>& game, std::int64_t max_profiles = 10'000'000);

/// Randomized check of the relay-insertion pattern: inserting a relay that
/// raises the inserting player's cost must raise the total cost too.
struct RelayInsertionReport {
  int samples = 0;
  int violations = 0;
};
RelayInsertionReport relay_insertion_monotonicity_check(int samples,
                                                        std::uint64_t seed);

/// Individual costs for raw trajectory collections in geometric mode (loops
/// allowed); used to validate loop pruning.
std::vector<double> raw_trajectory_costs(
    const UserConfiguration& users, const NetworkGeometry& geom,
    const PathLossModel& model,
    const std::vector<std::vector<int>>& relay_lists);

/// Removes the first loop found (a repeated visit) from a relay list.
std::vector<int> remove_one_loop(int transmitter,
                                 const std::vector<int>& relays);

}  // namespace hoplab
