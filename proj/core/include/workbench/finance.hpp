#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workbench/rng.hpp"
#include "workbench/stats.hpp"

namespace workbench::finance {

/// One-period binomial economy: the share moves from s0 to s0*u or s0*d, the
/// bond returns 1 + r. p_up is the real-world probability of the up move; it
/// never enters a price.
struct BinomialMarket {
  double s0 = 100.0;
  double u = 1.2;
  double d = 0.9;
  double r = 0.1;
  double p_up = 0.5;
};

enum class OptionKind { call, put };

struct OptionSpec {
  double strike = 100.0;
  std::size_t periods = 1;
  OptionKind kind = OptionKind::call;
};

/// B_0 in the bond and shares worth Delta_0 * S(0). Either may be negative.
struct Portfolio {
  double bond = 0.0;
  double shares_value = 0.0;
  double value() const { return bond + shares_value; }
};

struct GbmParams {
  double s0 = 100.0;
  double mu = 0.05;
  double sigma = 0.2;
  double r = 0.05;
};

enum class ArbitrageKind { none, borrow_and_buy, sell_and_lend };

struct ArbitrageCheck {
  bool arbitrage_free = true;
  ArbitrageKind kind = ArbitrageKind::none;
  std::string diagnostic;
};

void validate(const BinomialMarket& market);

/// No arbitrage iff d < 1 + r < u. If 1 + r <= d, borrowing to buy the share
/// never loses; if 1 + r >= u, shorting the share and lending never loses.
ArbitrageCheck check_no_arbitrage(const BinomialMarket& market);

/// q = (1 + r - d) / (u - d). Throws ArbitrageError outside d < 1 + r < u.
double risk_neutral_q(const BinomialMarket& market);

double payoff(OptionKind kind, double strike, double share_price);

/// Portfolio whose value after one period is payoff_up in the up state and
/// payoff_down in the down state.
Portfolio replicate_one_period(const BinomialMarket& market, double payoff_up, double payoff_down);

/// (1 + r)^{-1} (q C_u + (1 - q) C_d).
double price_one_period(const BinomialMarket& market, double payoff_up, double payoff_down);

struct TreePrice {
  double price = 0.0;
  double q = 0.0;
  /// values[t][i]: option value at time t after i up moves, i = 0..t.
  std::vector<std::vector<double>> values;
  /// share[t][i] = s0 u^i d^(t-i).
  std::vector<std::vector<double>> share;
};

/// Backward induction on the recombining tree.
TreePrice price_multi_period(const BinomialMarket& market, const OptionSpec& option);

/// max over nodes (t < periods) of
/// |E[(1+r)^{-(t+1)} S(t+1) | node] - (1+r)^{-t} S(t)| with the up move
/// taken with probability `up_probability`.
double martingale_defect_under(const BinomialMarket& market, std::size_t periods,
                               double up_probability);
/// The same with up_probability = q.
double discounted_martingale_defect(const BinomialMarket& market, std::size_t periods);

/// Per-step market of an n-step tree approximating GBM under Q on [0, T]:
/// u = exp(sigma sqrt(dt)), d = 1/u, 1 + r = exp(r dt).
BinomialMarket crr_market(const GbmParams& params, double maturity, std::size_t steps);

/// S(0) exp((mu - sigma^2 / 2) t + sigma W(t)), W(t) ~ Normal(0, t).
double gbm_exact_sample(const GbmParams& params, double t, RngStream& rng);

struct McPrice {
  stats::EstimateWithCI estimate;  // 99% interval
  std::size_t paths = 0;
};

/// Monte Carlo price E_Q[e^{-rT} payoff(S(T))] with the drift replaced by r.
/// Paths are split into fixed chunks, each on its own substream, so the
/// result does not depend on the number of worker threads.
McPrice mc_price_european(const GbmParams& params, OptionKind kind, double strike, double maturity,
                          std::size_t n_paths, const RngStream& rng);

/// {price, ci_low, ci_high, q, replication: {bond, shares_value}}.
nlohmann::json price_report(double price, double ci_low, double ci_high, double q,
                            const Portfolio& replication);

const char* to_string(OptionKind kind);
const char* to_string(ArbitrageKind kind);

}  // namespace workbench::finance
