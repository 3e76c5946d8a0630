#include "remest/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "remest/rng.hpp"

namespace remest {

std::string_view to_string(SimMode mode) noexcept { return mode == SimMode::analytic ? "analytic" : "trajectory"; }

SimMode parse_sim_mode(std::string_view text) {
  if (text == "analytic") return SimMode::analytic;
  if (text == "trajectory") return SimMode::trajectory;
  throw DomainError("unknown simulation mode '" + std::string(text) + "' (expected analytic or trajectory)");
}

SimulationBlowUp::SimulationBlowUp(std::size_t run, std::size_t step)
    : Error("simulate_trajectory: estimation error exceeded the cap in run " + std::to_string(run) + " at step " +
            std::to_string(step)),
      run_(run),
      step_(step) {}

namespace {

// Runs are grouped into fixed blocks; the reduction walks blocks in index
// order, so the result is independent of the thread count.
constexpr std::size_t kBlockRuns = 16;

struct BlockAccum {
  std::vector<double> mse_sum;
  std::vector<double> aoi_sum;
  std::vector<double> analytic_sum;
  std::vector<double> run_mse;
  std::vector<double> run_aoi;
  std::vector<double> run_analytic;
  std::vector<double> cov_sum;
  std::size_t saturated = 0;
  std::vector<ChainStep> trace;
};

struct ChannelState {
  std::size_t r = 0;
  std::size_t q = 0;
};

ChainStep advance(ChannelState& st, const PolicyGrid& policy, const HarqModel& m, Rng& rng) {
  ChainStep rec;
  rec.q_prev = st.q;
  rec.aoi = st.q + 1;
  rec.action = policy.at_saturated(st.r, st.q);
  st.r = rec.action == Action::transmit_new ? 0 : st.r + 1;
  rec.success = sample_detection(m, std::min(st.r, m.r_cap()), rng) == Detection::success;
  st.q = rec.success ? st.r : st.q + 1;
  rec.r = st.r;
  rec.q = st.q;
  return rec;
}

double table_cost(const SteadyKalman& sk, std::size_t q, std::size_t& saturated) {
  if (q < sk.cost_table.size()) return sk.cost_table[q];
  ++saturated;
  return sk.cost_table.back();
}

std::size_t resolve_threads(std::size_t requested, std::size_t blocks) {
  std::size_t t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return std::max<std::size_t>(1, std::min(t, blocks));
}

template <class BlockFn>
std::vector<BlockAccum> run_blocks(std::size_t runs, std::size_t threads, BlockFn&& fn) {
  const std::size_t blocks = (runs + kBlockRuns - 1) / kBlockRuns;
  std::vector<BlockAccum> out(blocks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::size_t first = b * kBlockRuns;
        fn(out[b], first, std::min(runs, first + kBlockRuns));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = blocks;
      }
    }
  };

  const std::size_t nthreads = resolve_threads(threads, blocks);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct Reduced {
  std::vector<double> mse_sum, aoi_sum, analytic_sum, cov_sum;
  std::vector<double> run_mse, run_aoi, run_analytic;
  std::size_t saturated = 0;
  std::vector<ChainStep> trace;
};

Reduced reduce(std::vector<BlockAccum>& blocks, std::size_t horizon, std::size_t cov_len) {
  Reduced red;
  red.mse_sum.assign(horizon, 0.0);
  red.aoi_sum.assign(horizon, 0.0);
  red.analytic_sum.assign(horizon, 0.0);
  red.cov_sum.assign(cov_len, 0.0);
  for (BlockAccum& b : blocks) {
    for (std::size_t k = 0; k < horizon; ++k) {
      red.mse_sum[k] += b.mse_sum[k];
      red.aoi_sum[k] += b.aoi_sum[k];
      if (!b.analytic_sum.empty()) red.analytic_sum[k] += b.analytic_sum[k];
    }
    for (std::size_t i = 0; i < b.cov_sum.size(); ++i) red.cov_sum[i] += b.cov_sum[i];
    red.run_mse.insert(red.run_mse.end(), b.run_mse.begin(), b.run_mse.end());
    red.run_aoi.insert(red.run_aoi.end(), b.run_aoi.begin(), b.run_aoi.end());
    red.run_analytic.insert(red.run_analytic.end(), b.run_analytic.begin(), b.run_analytic.end());
    red.saturated += b.saturated;
    if (!b.trace.empty()) red.trace = std::move(b.trace);
  }
  return red;
}

std::vector<double> running_mean(const std::vector<double>& step_sums, std::size_t runs) {
  std::vector<double> out(step_sums.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < step_sums.size(); ++k) {
    acc += step_sums[k] / static_cast<double>(runs);
    out[k] = acc / static_cast<double>(k + 1);
  }
  return out;
}

std::pair<double, double> mean_and_std_error(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

SimReport finish_report(Reduced& red, const SimConfig& cfg) {
  SimReport rep;
  rep.avg_mse_vs_k = running_mean(red.mse_sum, cfg.runs);
  rep.avg_aoi_vs_k = running_mean(red.aoi_sum, cfg.runs);
  rep.final_avg_mse = rep.avg_mse_vs_k.back();
  rep.final_avg_aoi = rep.avg_aoi_vs_k.back();
  rep.run_avg_mse = std::move(red.run_mse);
  rep.run_avg_aoi = std::move(red.run_aoi);
  rep.mse_std_error = mean_and_std_error(rep.run_avg_mse).second;
  rep.mse_half_width95 = 1.96 * rep.mse_std_error;
  rep.aoi_half_width95 = 1.96 * mean_and_std_error(rep.run_avg_aoi).second;
  rep.saturated_steps = red.saturated;
  rep.trace = std::move(red.trace);
  if (rep.saturated_steps > 0) {
    spdlog::warn("{} simulated steps had q past the cost table; their cost was saturated", rep.saturated_steps);
  }
  return rep;
}

void validate(const PolicyGrid& policy, const SteadyKalman& sk, const SimConfig& cfg) {
  if (cfg.horizon < 1) throw DomainError("SimConfig: horizon must be at least 1");
  if (cfg.runs < 1) throw DomainError("SimConfig: runs must be at least 1");
  if (cfg.initial_q > policy.q_max()) throw DomainError("SimConfig: initial_q exceeds q_max");
  if (sk.cost_table.empty()) throw DomainError("simulate: empty cost table");
}

// y = A x for an n x n row-major matrix.
inline void mul(const Mat& a, const double* x, double* y) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
}

inline void draw_gaussian(const Mat& chol, Rng& rng, double* z, double* out) {
  const std::size_t n = chol.rows();
  for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
  mul(chol, z, out);
}

}  // namespace

SimReport simulate_chain(const PolicyGrid& policy, const HarqModel& m, const SteadyKalman& sk, const SimConfig& cfg) {
  validate(policy, sk, cfg);
  const std::size_t horizon = cfg.horizon;

  auto blocks = run_blocks(cfg.runs, cfg.threads, [&](BlockAccum& acc, std::size_t first, std::size_t last) {
    acc.mse_sum.assign(horizon, 0.0);
    acc.aoi_sum.assign(horizon, 0.0);
    for (std::size_t run = first; run < last; ++run) {
      Rng channel = Rng::for_stream(cfg.seed, 2 * run);
      ChannelState st{0, cfg.initial_q};
      double mse_total = 0.0, aoi_total = 0.0;
      for (std::size_t k = 0; k < horizon; ++k) {
        const double cost = table_cost(sk, st.q, acc.saturated);
        const ChainStep rec = advance(st, policy, m, channel);
        acc.mse_sum[k] += cost;
        acc.aoi_sum[k] += static_cast<double>(rec.aoi);
        mse_total += cost;
        aoi_total += static_cast<double>(rec.aoi);
        if (cfg.record_trace && run == 0) acc.trace.push_back(rec);
      }
      acc.run_mse.push_back(mse_total / static_cast<double>(horizon));
      acc.run_aoi.push_back(aoi_total / static_cast<double>(horizon));
    }
  });

  Reduced red = reduce(blocks, horizon, 0);
  return finish_report(red, cfg);
}

TrajectoryReport simulate_trajectory(const PolicyGrid& policy, const LtiSystem& sys, const HarqModel& m,
                                     const SteadyKalman& sk, const SimConfig& cfg) {
  validate(policy, sk, cfg);
  const std::size_t n = sys.state_dim();
  const std::size_t p = sys.measurement_dim();
  const Mat& sigma0 = cfg.sigma0 ? *cfg.sigma0 : sk.p_bar0;
  if (sigma0.rows() != n || sigma0.cols() != n) throw DimensionError("simulate_trajectory: Sigma0 must be n x n");
  if (sk.gain.rows() != n || sk.gain.cols() != p) throw DimensionError("simulate_trajectory: Kalman gain shape mismatch");

  const Mat chol_sigma0 = linalg::cholesky_psd(sigma0);
  const Mat chol_q = linalg::cholesky_psd(sys.q());
  const Mat chol_r = linalg::cholesky_psd(sys.r());
  const Mat& a = sys.a();
  const Mat& gain = sk.gain;
  const Mat i_kc = Mat::identity(n) - gain * sys.c();
  const std::size_t horizon = cfg.horizon;
  const std::size_t q0 = cfg.initial_q;

  // The plant is unstable, so x_k itself overflows (and x - x̂ cancels
  // catastrophically) long before K steps. Every quantity of interest is an
  // estimation error, and those obey exact linear recursions driven by the
  // same noise, so the simulation runs in error coordinates:
  //   sensor   e_s  = x - x̂ˢ            e_s' = (I - K C)(A e_s + w) - K v'
  //   packet   e_p  = x - A^j x̂ˢ_{k-j}   e_p' = A e_p + w
  //   receiver e_rx = x - x̂             e_rx' = A e_p + w on delivery, A e_rx + w otherwise
  auto blocks = run_blocks(cfg.runs, cfg.threads, [&](BlockAccum& acc, std::size_t first, std::size_t last) {
    acc.mse_sum.assign(horizon, 0.0);
    acc.aoi_sum.assign(horizon, 0.0);
    acc.analytic_sum.assign(horizon, 0.0);
    acc.cov_sum.assign(n * n, 0.0);

    std::vector<double> e_s(n), e_p(n), e_rx(n), w(n), v(p), kv(n), tmp(n), z(std::max(n, p));

    for (std::size_t run = first; run < last; ++run) {
      Rng channel = Rng::for_stream(cfg.seed, 2 * run);
      Rng noise_rng = Rng::for_stream(cfg.seed, 2 * run + 1);

      // Advances every error one step with fresh process and measurement noise.
      auto step = [&](bool delivered) {
        draw_gaussian(chol_q, noise_rng, z.data(), w.data());
        draw_gaussian(chol_r, noise_rng, z.data(), v.data());
        mul(gain, v.data(), kv.data());
        mul(a, e_s.data(), tmp.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] += w[i];
        mul(i_kc, tmp.data(), e_s.data());
        for (std::size_t i = 0; i < n; ++i) e_s[i] -= kv[i];
        mul(a, (delivered ? e_p : e_rx).data(), tmp.data());
        for (std::size_t i = 0; i < n; ++i) e_rx[i] = tmp[i] + w[i];
        mul(a, e_p.data(), tmp.data());
        for (std::size_t i = 0; i < n; ++i) e_p[i] = tmp[i] + w[i];
      };

      // x̂ˢ at time -q0 is the prior mean, so its error is x_{-q0} ~ N(0, Σ₀).
      // The receiver starts from A^{q0+1} x̂ˢ_{-q0}; the packet in flight at
      // step 1 carries x̂ˢ_0.
      draw_gaussian(chol_sigma0, noise_rng, z.data(), e_s.data());
      e_rx = e_s;
      for (std::size_t t = 0; t <= q0; ++t) {
        e_p = e_s;
        step(false);
      }

      ChannelState st{0, q0};
      double emp_total = 0.0, ana_total = 0.0, aoi_total = 0.0;
      for (std::size_t k = 1; k <= horizon; ++k) {
        double err2 = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          err2 += e_rx[i] * e_rx[i];
          mag = std::max({mag, std::abs(e_rx[i]), std::abs(e_s[i])});
        }
        if (!(mag <= cfg.state_cap)) throw SimulationBlowUp(run, k);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) acc.cov_sum[i * n + j] += e_rx[i] * e_rx[j];

        const double analytic = table_cost(sk, st.q, acc.saturated);
        const ChainStep rec = advance(st, policy, m, channel);
        acc.mse_sum[k - 1] += err2;
        acc.analytic_sum[k - 1] += analytic;
        acc.aoi_sum[k - 1] += static_cast<double>(rec.aoi);
        emp_total += err2;
        ana_total += analytic;
        aoi_total += static_cast<double>(rec.aoi);
        if (cfg.record_trace && run == 0) acc.trace.push_back(rec);

        if (rec.action == Action::transmit_new) e_p = e_s;
        step(rec.success);
      }
      const double kf = static_cast<double>(horizon);
      acc.run_mse.push_back(emp_total / kf);
      acc.run_analytic.push_back(ana_total / kf);
      acc.run_aoi.push_back(aoi_total / kf);
    }
  });

  Reduced red = reduce(blocks, horizon, n * n);
  TrajectoryReport rep{.empirical = {}, .analytic_avg_mse_vs_k = running_mean(red.analytic_sum, cfg.runs),
                       .final_analytic_mse = 0.0, .run_avg_analytic = red.run_analytic,
                       .empirical_covariance = Mat(n, n), .paired_mean_diff = 0.0, .paired_std_error = 0.0};
  rep.final_analytic_mse = rep.analytic_avg_mse_vs_k.back();

  const double samples = static_cast<double>(horizon * cfg.runs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rep.empirical_covariance(i, j) = red.cov_sum[i * n + j] / samples;

  std::vector<double> diffs(red.run_mse.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = red.run_mse[i] - red.run_analytic[i];
  std::tie(rep.paired_mean_diff, rep.paired_std_error) = mean_and_std_error(diffs);

  rep.empirical = finish_report(red, cfg);
  return rep;
}

}  // namespace remest
