#include "hoplab/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "hoplab/rng.hpp"

namespace hoplab {

namespace {

std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("Frac: overflow");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

Frac::Frac(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("Frac: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Frac Frac::parse(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Frac(std::stoll(text.substr(0, slash)),
                std::stoll(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::int64_t den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Frac(std::stoll(digits), den);
  }
  return Frac(std::stoll(text));
}

Frac Frac::operator+(const Frac& o) const {
  return Frac(checked(static_cast<__int128>(num) * o.den +
                      static_cast<__int128>(o.num) * den),
              checked(static_cast<__int128>(den) * o.den));
}

Frac Frac::operator-(const Frac& o) const {
  return *this + Frac(-o.num, o.den);
}

Frac Frac::operator*(const Frac& o) const {
  return Frac(checked(static_cast<__int128>(num) * o.num),
              checked(static_cast<__int128>(den) * o.den));
}

Frac Frac::operator/(const Frac& o) const {
  if (o.num == 0) throw std::invalid_argument("Frac: division by zero");
  return Frac(checked(static_cast<__int128>(num) * o.den),
              checked(static_cast<__int128>(den) * o.num));
}

bool Frac::operator<(const Frac& o) const {
  return static_cast<__int128>(num) * o.den <
         static_cast<__int128>(o.num) * den;
}

std::string Frac::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

template <class Cost>
ProfileCosts<Cost> costs(const GameInstance<Cost>& game,
                         const std::vector<int>& profile) {
  std::vector<int> m(game.relay_ids, 0);
  for (int i = 0; i < game.players; ++i) {
    for (int relay : game.strategies[i][profile[i]].relays) m[relay] += 1;
  }
  ProfileCosts<Cost> out;
  out.individual.resize(game.players);
  Cost fixed_total{};
  Cost congestion_pairs{};  // sum m (m-1)
  for (int j = 0; j < game.relay_ids; ++j) {
    congestion_pairs =
        congestion_pairs + Cost(m[j]) * Cost(m[j] - 1);
  }
  for (int i = 0; i < game.players; ++i) {
    const Strategy<Cost>& s = game.strategies[i][profile[i]];
    Cost c = game.gamma * s.fixed_cost();
    fixed_total = fixed_total + s.fixed_cost();
    for (int relay : s.relays) c = c + game.beta * Cost(m[relay] - 1);
    out.individual[i] = c;
  }
  Cost total{};
  for (const Cost& c : out.individual) total = total + c;
  out.total = total;
  out.potential = game.gamma * fixed_total +
                  game.beta * congestion_pairs / Cost(2);
  return out;
}

namespace {

// Frac comparisons are exact; doubles get a 1e-12 relative slack so
// geometric-mode ties are not decided by rounding noise.
inline bool cost_lt(const Frac& a, const Frac& b) { return a < b; }
inline bool cost_lt(double a, double b) {
  const double slack =
      1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  return a < b - slack;
}
template <class Cost>
bool cost_eq(const Cost& a, const Cost& b) {
  return !cost_lt(a, b) && !cost_lt(b, a);
}

template <class Cost>
Cost deviation_cost(const GameInstance<Cost>& game,
                    const std::vector<int>& m,
                    const Strategy<Cost>& current,
                    const Strategy<Cost>& candidate) {
  Cost c = game.gamma * candidate.fixed_cost();
  for (int relay : candidate.relays) {
    int others = m[relay];
    for (int own : current.relays) {
      if (own == relay) others -= 1;
    }
    c = c + game.beta * Cost(others);
  }
  return c;
}

template <class Cost>
std::vector<int> relay_counts(const GameInstance<Cost>& game,
                              const std::vector<int>& profile) {
  std::vector<int> m(game.relay_ids, 0);
  for (int i = 0; i < game.players; ++i) {
    for (int relay : game.strategies[i][profile[i]].relays) m[relay] += 1;
  }
  return m;
}

}  // namespace

template <class Cost>
bool is_nash(const GameInstance<Cost>& game, const std::vector<int>& profile) {
  const std::vector<int> m = relay_counts(game, profile);
  for (int i = 0; i < game.players; ++i) {
    const Strategy<Cost>& current = game.strategies[i][profile[i]];
    const Cost own = deviation_cost(game, m, current, current);
    for (std::size_t alt = 0; alt < game.strategies[i].size(); ++alt) {
      if (static_cast<int>(alt) == profile[i]) continue;
      if (cost_lt(deviation_cost(game, m, current, game.strategies[i][alt]),
                  own)) {
        return false;
      }
    }
  }
  return true;
}

template <class Cost>
std::vector<int> best_response_dynamics(const GameInstance<Cost>& game,
                                        std::vector<int> profile) {
  std::int64_t guard = game.profile_count();
  if (guard < 0) guard = std::numeric_limits<std::int64_t>::max();
  guard += game.players + 1;
  std::int64_t steps = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < game.players; ++i) {
      const std::vector<int> m = relay_counts(game, profile);
      const Strategy<Cost>& current = game.strategies[i][profile[i]];
      int best = profile[i];
      Cost best_cost = deviation_cost(game, m, current, current);
      for (std::size_t alt = 0; alt < game.strategies[i].size(); ++alt) {
        const Cost c =
            deviation_cost(game, m, current, game.strategies[i][alt]);
        // Strict improvement only; ties keep the incumbent, and among
        // improving strategies the lowest index wins.
        if (cost_lt(c, best_cost)) {
          best_cost = c;
          best = static_cast<int>(alt);
        }
      }
      if (best != profile[i]) {
        profile[i] = best;
        changed = true;
      }
      if (++steps > guard) {
        throw std::runtime_error(
            "best_response_dynamics: step guard exceeded");
      }
    }
  }
  return profile;
}

template <class Cost>
EquilibriaResult<Cost> equilibria_and_optima(const GameInstance<Cost>& game,
                                             std::int64_t max_profiles) {
  const std::int64_t total = game.profile_count();
  if (total < 0 || total > max_profiles) {
    throw GameBudgetError("equilibria_and_optima: profile budget exceeded");
  }
  EquilibriaResult<Cost> result;
  std::vector<int> profile(game.players, 0);
  bool first = true;
  Cost best_total{};
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const ProfileCosts<Cost> pc = costs(game, profile);
    if (first || cost_lt(pc.total, best_total)) {
      best_total = pc.total;
      result.optima.clear();
      result.optima.push_back(profile);
      first = false;
    } else if (cost_eq(pc.total, best_total)) {
      result.optima.push_back(profile);
    }
    if (is_nash(game, profile)) result.nash.push_back(profile);
    for (int i = game.players - 1; i >= 0; --i) {
      profile[i] += 1;
      if (profile[i] < static_cast<int>(game.strategies[i].size())) break;
      profile[i] = 0;
    }
  }
  result.optimum_cost = best_total;
  result.non_selfish = false;
  if (!result.nash.empty()) {
    bool strictly_below_all = true;
    for (const auto& nash : result.nash) {
      const ProfileCosts<Cost> pc = costs(game, nash);
      if (!cost_lt(best_total, pc.total)) strictly_below_all = false;
    }
    result.non_selfish = strictly_below_all;
  }
  return result;
}

GeometricGame build_geometric_game(const UserConfiguration& users,
                                   const NetworkGeometry& geom,
                                   const PathLossModel& model) {
  const int n = users.count();
  if (n > 12 || geom.k_max > 3) {
    throw GameBudgetError("build_geometric_game: N <= 12 and k_max <= 3");
  }
  const Eigen::MatrixXd sir_inv = sir_inverse_table(users, model);
  GeometricGame game;
  game.players = n;
  game.relay_ids = n;
  game.gamma = geom.gamma;
  game.beta = geom.beta;
  game.strategies.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Strategy<double>> list;
    // Direct path.
    list.push_back({{sir_inv(i, n)}, {}});
    if (geom.k_max >= 2) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        list.push_back({{sir_inv(i, j), sir_inv(j, n)}, {j}});
      }
    }
    if (geom.k_max >= 3) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          if (j == i || k == i || j == k) continue;
          list.push_back(
              {{sir_inv(i, j), sir_inv(j, k), sir_inv(k, n)}, {j, k}});
        }
      }
    }
    // Prune paths a relay removal strictly improves: they are strictly
    // dominated by the shortened path, which is also in the set.
    std::vector<Strategy<double>> kept;
    for (const Strategy<double>& s : list) {
      bool dominated = false;
      if (s.relays.size() == 1) {
        dominated = sir_inv(i, n) < s.fixed_cost();
      } else if (s.relays.size() == 2) {
        const int j = s.relays[0], k = s.relays[1];
        dominated =
            (sir_inv(i, k) + sir_inv(k, n) < s.fixed_cost()) ||
            (sir_inv(i, j) + sir_inv(j, n) < s.fixed_cost());
      }
      if (!dominated) kept.push_back(s);
    }
    game.strategies[i] = std::move(kept);
  }
  return game;
}

AbstractGame abstract_game_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  AbstractGame game;
  game.players = j.at("players").get<int>();
  auto parse_cost = [](const nlohmann::json& v) {
    if (v.is_string()) return Frac::parse(v.get<std::string>());
    if (v.is_number_integer()) return Frac(v.get<std::int64_t>());
    throw std::invalid_argument(
        "abstract game: costs must be integers or \"p/q\" strings");
  };
  game.gamma = j.contains("gamma") ? parse_cost(j.at("gamma")) : Frac(1);
  game.beta = j.contains("beta") ? parse_cost(j.at("beta")) : Frac(0);
  int max_relay = -1;
  for (const auto& player : j.at("strategies")) {
    std::vector<Strategy<Frac>> list;
    for (const auto& strat : player) {
      Strategy<Frac> s;
      for (const auto& h : strat.at("hops")) s.hop_costs.push_back(parse_cost(h));
      if (strat.contains("relays")) {
        for (const auto& r : strat.at("relays")) {
          s.relays.push_back(r.get<int>());
          max_relay = std::max(max_relay, s.relays.back());
        }
      }
      if (s.relays.size() + 1 != s.hop_costs.size()) {
        throw std::invalid_argument(
            "abstract game: need one more hop than relays");
      }
      list.push_back(std::move(s));
    }
    game.strategies.push_back(std::move(list));
  }
  if (static_cast<int>(game.strategies.size()) != game.players) {
    throw std::invalid_argument("abstract game: players/strategies mismatch");
  }
  game.relay_ids = max_relay + 1;
  return game;
}

std::string game_report_json(const AbstractGame& game,
                             const std::vector<std::vector<int>>& nash,
                             const std::vector<std::vector<int>>& optima,
                             bool non_selfish) {
  nlohmann::json j;
  j["players"] = game.players;
  j["nash"] = nash;
  j["optima"] = optima;
  j["non_selfish_optimum"] = non_selfish;
  std::vector<std::string> nash_costs;
  for (const auto& p : nash) {
    nash_costs.push_back(costs(game, p).total.to_string());
  }
  j["nash_costs"] = nash_costs;
  if (!optima.empty()) {
    j["optimum_cost"] = costs(game, optima.front()).total.to_string();
  }
  return j.dump();
}

RelayInsertionReport relay_insertion_monotonicity_check(int samples,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  RelayInsertionReport report;
  for (int s = 0; s < samples; ++s) {
    // Random instance of the insertable-relay pattern: player 0 chooses
    // between a direct hop (p0) and a two-hop path (p1, p2) through a relay
    // already carrying m incoming hops from fixed background players.
    const auto frac = [&](int lo, int hi) {
      return Frac(static_cast<std::int64_t>(rng.uniform_index(hi - lo) + lo),
                  static_cast<std::int64_t>(rng.uniform_index(7) + 1));
    };
    const Frac p0 = frac(1, 40), p1 = frac(1, 20), p2 = frac(1, 20);
    const int m = static_cast<int>(rng.uniform_index(4));
    AbstractGame game;
    game.players = 1 + m;
    game.relay_ids = 1;
    game.gamma = Frac(1);
    game.beta = frac(0, 10) + Frac(1, 13);
    game.strategies.resize(game.players);
    game.strategies[0].push_back({{p0}, {}});
    game.strategies[0].push_back({{p1, p2}, {0}});
    for (int b = 0; b < m; ++b) {
      game.strategies[1 + b].push_back({{frac(1, 10), frac(1, 10)}, {0}});
    }
    std::vector<int> direct(game.players, 0);
    std::vector<int> inserted(game.players, 0);
    inserted[0] = 1;
    const ProfileCosts<Frac> before = costs(game, direct);
    const ProfileCosts<Frac> after = costs(game, inserted);
    ++report.samples;
    const bool individual_up = after.individual[0] > before.individual[0];
    const bool total_up = after.total > before.total;
    if (individual_up && !total_up) ++report.violations;
  }
  return report;
}

std::vector<double> raw_trajectory_costs(
    const UserConfiguration& users, const NetworkGeometry& geom,
    const PathLossModel& model,
    const std::vector<std::vector<int>>& relay_lists) {
  const int n = users.count();
  const Eigen::MatrixXd sir_inv = sir_inverse_table(users, model);
  std::vector<int> m(n, 0);
  for (const auto& relays : relay_lists) {
    for (int r : relays) m[r] += 1;
  }
  std::vector<double> out(relay_lists.size(), 0.0);
  for (std::size_t i = 0; i < relay_lists.size(); ++i) {
    double fixed = 0.0;
    int prev = static_cast<int>(i);
    for (int r : relay_lists[i]) {
      fixed += sir_inv(prev, r);
      prev = r;
    }
    fixed += sir_inv(prev, n);
    double congestion = 0.0;
    for (int r : relay_lists[i]) congestion += m[r] - 1;
    out[i] = geom.gamma * fixed + geom.beta * congestion;
  }
  return out;
}

std::vector<int> remove_one_loop(int transmitter,
                                 const std::vector<int>& relays) {
  std::vector<int> nodes{transmitter};
  nodes.insert(nodes.end(), relays.begin(), relays.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i] == nodes[j]) {
        // Drop the cycle (i, j]: relays at positions i..j-1 of the list.
        std::vector<int> out;
        for (std::size_t l = 0; l < relays.size(); ++l) {
          if (l + 1 > i && l + 1 <= j) continue;
          out.push_back(relays[l]);
        }
        return out;
      }
    }
  }
  return relays;
}

template struct GameInstance<Frac>;
template struct GameInstance<double>;
template ProfileCosts<Frac> costs(const GameInstance<Frac>&,
                                  const std::vector<int>&);
template ProfileCosts<double> costs(const GameInstance<double>&,
                                    const std::vector<int>&);
template bool is_nash(const GameInstance<Frac>&, const std::vector<int>&);
template bool is_nash(const GameInstance<double>&, const std::vector<int>&);
template std::vector<int> best_response_dynamics(const GameInstance<Frac>&,
                                                 std::vector<int>);
template std::vector<int> best_response_dynamics(const GameInstance<double>&,
                                                 std::vector<int>);
template EquilibriaResult<Frac> equilibria_and_optima(
    const GameInstance<Frac>&, std::int64_t);
template EquilibriaResult<double> equilibria_and_optima(
    const GameInstance<double>&, std::int64_t);

}  // namespace hoplab
