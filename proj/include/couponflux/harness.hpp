#pragma once

// Statistical harness: sample-set containers, the Exp(1) limit-law check,
// moment summaries with jackknife errors, the rare-event hypothesis audit,
// and deterministic parameter sweeps emitting experiment records.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "careless.hpp"
#include "chain.hpp"
#include "clumsy.hpp"
#include "combined.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "logspace.hpp"
#include "record.hpp"
#include "reset.hpp"
#include "rng.hpp"

namespace couponflux {

// ---------------------------------------------------------------------------
// Sample sets

struct HittingSampleSet {
    std::string model_id;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    double log_normalization = kNegInf;  // log of the flux scale mu used for T -> mu T
    std::vector<std::uint64_t> samples;  // completed hitting times only
    std::uint64_t censored = 0;          // runs cut off at the step budget
};

inline HittingSampleSet make_sample_set(std::string model_id,
                                        std::map<std::string, double> params, std::uint64_t seed,
                                        double log_normalization, const BatchResult& batch) {
    if (!std::isfinite(log_normalization))
        throw DomainError("normalization must be positive and finite");
    HittingSampleSet set;
    set.model_id = std::move(model_id);
    set.params = std::move(params);
    set.seed = seed;
    set.log_normalization = log_normalization;
    set.samples.reserve(batch.samples.size());
    for (std::size_t i = 0; i < batch.samples.size(); ++i)
        if (!batch.censored[i]) set.samples.push_back(batch.samples[i]);
    set.censored = batch.censored_count;
    return set;
}

inline ordered_json to_json(const HittingSampleSet& s) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "hitting_samples";
    j["model"] = s.model_id;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : s.params) params[k] = v;
    j["params"] = params;
    j["seed"] = s.seed;
    j["log_normalization"] = s.log_normalization;
    j["censored"] = s.censored;
    j["samples"] = s.samples;
    j["tool_version"] = kToolVersion;
    j["timestamp"] = utc_timestamp();
    return j;
}

inline HittingSampleSet sample_set_from_json(const ordered_json& j) {
    if (j.value("kind", std::string{}) != "hitting_samples")
        throw DomainError("not a hitting_samples document");
    HittingSampleSet s;
    s.model_id = j.at("model").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = v.get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.log_normalization = j.at("log_normalization").get<double>();
    s.censored = j.at("censored").get<std::uint64_t>();
    s.samples = j.at("samples").get<std::vector<std::uint64_t>>();
    return s;
}

// ---------------------------------------------------------------------------
// Exp(1) limit-law check

struct LimitLawReport {
    std::size_t count = 0;  // uncensored samples entering the statistic
    double censor_fraction = 0.0;
    double ks_statistic = 0.0;
    double ks_threshold = 0.0;  // 1.63 / sqrt(N), the asymptotic 1% point
    std::array<double, 4> empirical_moments{};   // mean of (mu T)^r, r = 1..4
    std::array<double, 4> reference_moments{};   // r! for Exp(1)
    bool ks_pass = false;
    bool censor_pass = false;  // censored fraction at most 1%
    bool pass = false;
};

inline constexpr double kKsOnePercent = 1.63;
inline constexpr double kCensorCap = 0.01;
inline constexpr std::size_t kKsMinSamples = 1000;

// Two-sided KS distance of the rescaled hitting times against 1 - exp(-x).
// Censored runs never enter the statistic; they only move the censor gate.
inline LimitLawReport exp1_ks(const HittingSampleSet& set) {
    const std::size_t N = set.samples.size();
    if (N < kKsMinSamples) throw TooFewSamples("need at least 1000 uncensored samples");

    std::vector<double> x(N);
    for (std::size_t i = 0; i < N; ++i)
        x[i] = std::exp(set.log_normalization + std::log(static_cast<double>(set.samples[i])));
    std::sort(x.begin(), x.end());

    LimitLawReport rep;
    rep.count = N;
    rep.censor_fraction =
        static_cast<double>(set.censored) / static_cast<double>(set.censored + N);
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double f = -std::expm1(-x[i]);
        d = std::max(d, f - static_cast<double>(i) / static_cast<double>(N));
        d = std::max(d, static_cast<double>(i + 1) / static_cast<double>(N) - f);
    }
    rep.ks_statistic = d;
    rep.ks_threshold = kKsOnePercent / std::sqrt(static_cast<double>(N));
    for (int r = 1; r <= 4; ++r) {
        double acc = 0.0;
        for (double v : x) acc += std::pow(v, r);
        rep.empirical_moments[r - 1] = acc / static_cast<double>(N);
        rep.reference_moments[r - 1] = std::tgamma(static_cast<double>(r) + 1.0);
    }
    rep.ks_pass = rep.ks_statistic <= rep.ks_threshold;
    rep.censor_pass = rep.censor_fraction <= kCensorCap;
    rep.pass = rep.ks_pass && rep.censor_pass;
    return rep;
}

// Two-sample KS distance between empirical distributions (for comparing two
// samplers of the same law).
inline double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw TooFewSamples("two-sample KS needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Moment summaries

struct MomentReport {
    struct Row {
        int order;
        double empirical;
        double standard_error;  // jackknife SE of the mean of x^order
        double reference;       // order! for Exp(1)
    };
    std::vector<Row> rows;
};

// Leave-one-out jackknife for a plain mean collapses to the closed form
// sd(x^r)/sqrt(N); computed that way rather than by N re-means.
inline MomentReport moment_report(const std::vector<double>& x, int r_max) {
    if (r_max < 1 || r_max > 4) throw DomainError("moment order must lie in 1..4");
    if (x.size() < 2) throw TooFewSamples("need at least 2 samples for a jackknife error");
    const double N = static_cast<double>(x.size());
    MomentReport rep;
    for (int r = 1; r <= r_max; ++r) {
        double mean = 0.0;
        for (double v : x) mean += std::pow(v, r);
        mean /= N;
        double ss = 0.0;
        for (double v : x) {
            double d = std::pow(v, r) - mean;
            ss += d * d;
        }
        double se = std::sqrt(ss / (N * (N - 1.0)));
        rep.rows.push_back({r, mean, se, std::tgamma(static_cast<double>(r) + 1.0)});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Rare-event hypothesis audit

struct AuditRecord {
    std::uint64_t block_length = 0;  // b
    std::uint64_t horizon = 0;       // h
    double b_mu = 0.0;               // expected target entries per block
    double mixing_at_h = 0.0;        // model-specific mixing bound at t = h
    double mixing_ratio = 0.0;       // mixing_at_h / b_mu
    double m2_over_m1 = 0.0;         // block clumping ratio
    double burn_in_bound = 0.0;      // h * per-step entry ceiling, recorded only
    double m1_defect_bound = 0.0;    // |P(N_b >= 1)/(b mu) - 1| <= M2/(2 M1)
    bool flag_bmu = false;
    bool flag_mixing = false;
    bool flag_clump = false;
    bool all_pass = false;
};

inline constexpr double kAuditThreshold = 0.1;

inline std::uint64_t default_block_length(int n) {
    auto u = static_cast<std::uint64_t>(n);
    return u * u * u;
}

// Horizon ceil(C n^2) with C = 2; a decay rate below e^-2 lifts C to
// ceil(log(1/rate)) so the comparison point stays past the transient.
inline std::uint64_t default_audit_horizon(int n, double decay_rate) {
    double C = 2.0;
    if (decay_rate < std::exp(-2.0)) C = std::ceil(std::log(1.0 / decay_rate));
    return static_cast<std::uint64_t>(std::ceil(C * static_cast<double>(n) * n));
}

// Checks the three conditions behind treating completion entries as a
// Poisson-thin stream: rare per block, mixed well before the block scale, and
// unclumped. Burn-in exposure is recorded for context but carries no flag.
inline AuditRecord hypothesis_audit(const CountKernel& P, const TargetSet& target,
                                    std::uint64_t block_length, std::uint64_t horizon,
                                    double mixing_at_h, double step_rate_ceiling) {
    if (block_length < 1 || horizon < 1) throw DomainError("block and horizon must be positive");
    StationaryDistribution pi = stationary_distribution(P);
    BlockMomentReport mom =
        block_entry_moments(P, pi, target, static_cast<long long>(block_length));

    AuditRecord rec;
    rec.block_length = block_length;
    rec.horizon = horizon;
    rec.b_mu = mom.first_moment;
    rec.mixing_at_h = mixing_at_h;
    rec.mixing_ratio = rec.b_mu > 0.0 ? mixing_at_h / rec.b_mu
                                      : std::numeric_limits<double>::infinity();
    rec.m2_over_m1 = mom.ratio;
    rec.burn_in_bound = static_cast<double>(horizon) * step_rate_ceiling;
    rec.m1_defect_bound = rec.b_mu > 0.0 ? 0.5 * mom.ratio : 0.0;
    rec.flag_bmu = rec.b_mu <= kAuditThreshold;
    rec.flag_mixing = rec.mixing_ratio <= kAuditThreshold;
    rec.flag_clump = rec.m2_over_m1 <= kAuditThreshold;
    rec.all_pass = rec.flag_bmu && rec.flag_mixing && rec.flag_clump;
    return rec;
}

// ---------------------------------------------------------------------------
// Exact-quantity bundles and sweeps

namespace detail {

inline double require_param(const std::map<std::string, double>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw DomainError("missing parameter " + key);
    return it->second;
}

inline int require_int_param(const std::map<std::string, double>& params, const std::string& key) {
    return static_cast<int>(std::llround(require_param(params, key)));
}

// Emit log_<name> always; the linear twin only while |log| stays within
// double range (the record's log_space flag marks the omissions).
inline void emit_pair(ExperimentRecord& rec, const std::string& name, double log_value) {
    rec.outputs["log_" + name] = log_value;
    if (std::fabs(log_value) <= 700.0) {
        rec.outputs[name] = std::exp(log_value);
    } else {
        rec.log_space = true;
    }
}

}  // namespace detail

// Closed-form quantities for one parameter point, shared by the exact CLI
// subcommand and by sweeps. Means come from the complement linear solve and
// are skipped once they overflow double range.
inline void exact_bundle(ExperimentRecord& rec) {
    const auto& pr = rec.params;
    if (rec.model == "reset") {
        ResetParams p(detail::require_int_param(pr, "n"), detail::require_param(pr, "rho"));
        ResetSolution sol = solve_reset(p);
        detail::emit_pair(rec, "s", sol.log_s);
        double log_mean = std::log1p(-sol.s) - std::log(p.rho) - sol.log_s;
        detail::emit_pair(rec, "mean", log_mean);
        rec.outputs["rho_s"] = p.rho * sol.s;
        return;
    }

    CountKernel K(0, {1.0});
    TargetSet target({0});
    int start = 0;
    FluxReport flux{};
    if (rec.model == "clumsy") {
        ClumsyParams p(detail::require_int_param(pr, "n"), detail::require_param(pr, "p"));
        K = clumsy_count_kernel(p);
        target = clumsy_completion_target();
        start = p.n;
        flux = clumsy_flux(p);
    } else if (rec.model == "careless") {
        CarelessParams p(detail::require_int_param(pr, "n"), detail::require_param(pr, "q"));
        K = careless_kernel(p);
        target = careless_completion_target(p);
        start = 0;
        flux = careless_flux(p);
    } else if (rec.model == "combined") {
        CombinedParams p(detail::require_int_param(pr, "n"), detail::require_param(pr, "alpha"),
                         detail::require_param(pr, "beta"));
        K = combined_kernel(p);
        target = combined_completion_target(p);
        start = 0;
        flux = combined_flux(p);
    } else {
        throw DomainError("unknown model " + rec.model);
    }

    detail::emit_pair(rec, "mu", flux.log_exact);
    rec.outputs["log_mu_predicted"] = flux.log_predicted;
    rec.outputs["log_mu_ratio"] = flux.log_ratio;
    double mean = mean_hitting_time(K, target, start);
    if (std::isfinite(mean)) detail::emit_pair(rec, "mean", std::log(mean));
    return;
}

struct SweepPlan {
    std::string model;
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::pair<std::string, std::vector<double>>> axes;  // sorted by name
};

inline SweepPlan plan_from_json(const ordered_json& j) {
    SweepPlan plan;
    plan.model = j.at("model").get<std::string>();
    plan.seed = j.value("seed", kDefaultSeed);
    if (!j.contains("grid") || !j.at("grid").is_object())
        throw DomainError("sweep plan needs a grid object");
    for (const auto& [k, v] : j.at("grid").items()) {
        if (!v.is_array() || v.empty()) throw DomainError("sweep axis " + k + " is empty");
        plan.axes.emplace_back(k, v.get<std::vector<double>>());
    }
    std::sort(plan.axes.begin(), plan.axes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return plan;
}

// Cartesian sweep in row-major order over the name-sorted axes. A failing
// point contributes a record carrying the error name; it never aborts the
// sweep. Identical plans give identical record sequences.
inline std::vector<ExperimentRecord> sweep(const SweepPlan& plan) {
    if (plan.axes.empty()) throw DomainError("sweep grid is empty");
    std::size_t total = 1;
    for (const auto& [name, values] : plan.axes) {
        if (values.empty()) throw DomainError("sweep axis " + name + " is empty");
        total *= values.size();
    }
    const std::string stamp = utc_timestamp();

    std::vector<ExperimentRecord> records;
    records.reserve(total);
    std::vector<std::size_t> idx(plan.axes.size(), 0);
    for (std::size_t point = 0; point < total; ++point) {
        ExperimentRecord rec;
        rec.model = plan.model;
        rec.seed = plan.seed;
        rec.timestamp = stamp;
        for (std::size_t a = 0; a < plan.axes.size(); ++a)
            rec.params[plan.axes[a].first] = plan.axes[a].second[idx[a]];
        try {
            exact_bundle(rec);
        } catch (const Error& e) {
            rec.outputs.clear();
            rec.error = e.name();
        }
        records.push_back(std::move(rec));
        for (std::size_t a = plan.axes.size(); a-- > 0;) {
            if (++idx[a] < plan.axes[a].second.size()) break;
            idx[a] = 0;
        }
    }
    return records;
}

}
