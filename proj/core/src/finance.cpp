#include "workbench/finance.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "workbench/error.hpp"
#include "workbench/parallel.hpp"

namespace workbench::finance {
namespace {

using detail::require;

constexpr std::size_t kPathsPerChunk = 1 << 14;

}  // namespace

void validate(const BinomialMarket& m) {
  require(std::isfinite(m.s0) && m.s0 > 0.0, "market: s0 must be > 0");
  require(std::isfinite(m.u) && std::isfinite(m.d) && m.d > 0.0 && m.d < m.u,
          "market: requires 0 < d < u");
  require(std::isfinite(m.r) && m.r > -1.0, "market: requires r > -1");
  require(std::isfinite(m.p_up) && m.p_up >= 0.0 && m.p_up <= 1.0, "market: p_up must lie in [0, 1]");
}

ArbitrageCheck check_no_arbitrage(const BinomialMarket& market) {
  validate(market);
  const double growth = 1.0 + market.r;
  if (growth <= market.d)
    return {false, ArbitrageKind::borrow_and_buy,
            "1+r <= d: borrow at the risk-free rate and buy the share; the share beats the "
            "loan in both states"};
  if (growth >= market.u)
    return {false, ArbitrageKind::sell_and_lend,
            "1+r >= u: short the share and lend the proceeds; the loan beats the share in both "
            "states"};
  return {true, ArbitrageKind::none, "d < 1+r < u: no arbitrage"};
}

double risk_neutral_q(const BinomialMarket& market) {
  const auto check = check_no_arbitrage(market);
  if (!check.arbitrage_free) throw ArbitrageError("risk-neutral probability undefined: " + check.diagnostic);
  return (1.0 + market.r - market.d) / (market.u - market.d);
}

double payoff(OptionKind kind, double strike, double share_price) {
  return kind == OptionKind::call ? std::max(share_price - strike, 0.0)
                                  : std::max(strike - share_price, 0.0);
}

Portfolio replicate_one_period(const BinomialMarket& market, double payoff_up, double payoff_down) {
  risk_neutral_q(market);  // arbitrage check
  const double spread = market.u - market.d;
  return {(market.u * payoff_down - market.d * payoff_up) / ((1.0 + market.r) * spread),
          (payoff_up - payoff_down) / spread};
}

double price_one_period(const BinomialMarket& market, double payoff_up, double payoff_down) {
  const double q = risk_neutral_q(market);
  return (q * payoff_up + (1.0 - q) * payoff_down) / (1.0 + market.r);
}

TreePrice price_multi_period(const BinomialMarket& market, const OptionSpec& option) {
  require(option.periods >= 1, "option: periods must be >= 1");
  require(std::isfinite(option.strike) && option.strike >= 0.0, "option: strike must be >= 0");
  TreePrice tree;
  tree.q = risk_neutral_q(market);
  const std::size_t periods = option.periods;
  const double discount = 1.0 / (1.0 + market.r);
  tree.share.resize(periods + 1);
  tree.values.resize(periods + 1);
  for (std::size_t t = 0; t <= periods; ++t) {
    tree.share[t].resize(t + 1);
    tree.values[t].resize(t + 1);
    for (std::size_t i = 0; i <= t; ++i)
      tree.share[t][i] = market.s0 * std::pow(market.u, static_cast<double>(i)) *
                         std::pow(market.d, static_cast<double>(t - i));
  }
  for (std::size_t i = 0; i <= periods; ++i)
    tree.values[periods][i] = payoff(option.kind, option.strike, tree.share[periods][i]);
  for (std::size_t t = periods; t-- > 0;)
    for (std::size_t i = 0; i <= t; ++i)
      tree.values[t][i] =
          discount * (tree.q * tree.values[t + 1][i + 1] + (1.0 - tree.q) * tree.values[t + 1][i]);
  tree.price = tree.values[0][0];
  return tree;
}

double martingale_defect_under(const BinomialMarket& market, std::size_t periods,
                               double up_probability) {
  validate(market);
  require(periods >= 1, "martingale defect: periods must be >= 1");
  require(up_probability >= 0.0 && up_probability <= 1.0, "martingale defect: probability in [0, 1]");
  const double growth = 1.0 + market.r;
  double defect = 0.0;
  for (std::size_t t = 0; t < periods; ++t) {
    const double now_discount = std::pow(growth, -static_cast<double>(t));
    const double next_discount = now_discount / growth;
    for (std::size_t i = 0; i <= t; ++i) {
      const double s = market.s0 * std::pow(market.u, static_cast<double>(i)) *
                       std::pow(market.d, static_cast<double>(t - i));
      const double expected_next =
          next_discount * (up_probability * s * market.u + (1.0 - up_probability) * s * market.d);
      defect = std::max(defect, std::abs(expected_next - now_discount * s));
    }
  }
  return defect;
}

double discounted_martingale_defect(const BinomialMarket& market, std::size_t periods) {
  return martingale_defect_under(market, periods, risk_neutral_q(market));
}

BinomialMarket crr_market(const GbmParams& params, double maturity, std::size_t steps) {
  require(maturity > 0.0 && steps >= 1, "crr_market: requires maturity > 0 and steps >= 1");
  require(params.sigma > 0.0, "crr_market: sigma must be > 0");
  const double dt = maturity / static_cast<double>(steps);
  BinomialMarket m;
  m.s0 = params.s0;
  m.u = std::exp(params.sigma * std::sqrt(dt));
  m.d = 1.0 / m.u;
  m.r = std::expm1(params.r * dt);
  m.p_up = 0.5;
  return m;
}

double gbm_exact_sample(const GbmParams& params, double t, RngStream& rng) {
  require(std::isfinite(params.s0) && params.s0 > 0.0, "gbm: s0 must be > 0");
  require(std::isfinite(params.sigma) && params.sigma >= 0.0, "gbm: sigma must be >= 0");
  require(std::isfinite(t) && t >= 0.0, "gbm: t must be >= 0");
  const double w = std::sqrt(t) * rng.standard_normal();
  return params.s0 * std::exp((params.mu - 0.5 * params.sigma * params.sigma) * t + params.sigma * w);
}

McPrice mc_price_european(const GbmParams& params, OptionKind kind, double strike, double maturity,
                          std::size_t n_paths, const RngStream& rng) {
  require(n_paths >= 100, "mc_price_european: needs at least 100 paths");
  require(std::isfinite(strike) && strike >= 0.0, "mc_price_european: strike must be >= 0");
  require(std::isfinite(maturity) && maturity > 0.0, "mc_price_european: maturity must be > 0");
  GbmParams q_params = params;
  q_params.mu = params.r;
  const double discount = std::exp(-params.r * maturity);
  const std::size_t chunks = (n_paths + kPathsPerChunk - 1) / kPathsPerChunk;
  const auto pieces = parallel_map(chunks, [&](std::size_t c) {
    RngStream stream = rng.substream(c);
    const std::size_t begin = c * kPathsPerChunk;
    const std::size_t end = std::min(n_paths, begin + kPathsPerChunk);
    std::vector<double> discounted(end - begin);
    for (auto& v : discounted)
      v = discount * payoff(kind, strike, gbm_exact_sample(q_params, maturity, stream));
    return discounted;
  });
  std::vector<double> all;
  all.reserve(n_paths);
  for (const auto& piece : pieces) all.insert(all.end(), piece.begin(), piece.end());
  return {stats::mean_ci(all, 0.99), n_paths};
}

nlohmann::json price_report(double price, double ci_low, double ci_high, double q,
                            const Portfolio& replication) {
  return {{"price", price},
          {"ci_low", ci_low},
          {"ci_high", ci_high},
          {"q", q},
          {"replication", {{"bond", replication.bond}, {"shares_value", replication.shares_value}}}};
}

const char* to_string(OptionKind kind) { return kind == OptionKind::call ? "call" : "put"; }

const char* to_string(ArbitrageKind kind) {
  switch (kind) {
    case ArbitrageKind::none:
      return "none";
    case ArbitrageKind::borrow_and_buy:
      return "borrow-and-buy";
    case ArbitrageKind::sell_and_lend:
      return "sell-and-lend";
  }
  return "unknown";
}

}  // namespace workbench::finance
