// couponflux: command-line front end for the coupon-collector rare-event
// toolkit. Subcommands expose closed forms (exact, flux, qseries), the
// simulators (simulate), deterministic parameter sweeps (sweep), and the
// self-check suites (verify).
//
// Exit codes: 0 success, 1 failed verify checks, 2 usage errors, 3 domain or
// numerical errors (the module error name is printed to stderr).

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <couponflux/careless.hpp>
#include <couponflux/chain.hpp>
#include <couponflux/clumsy.hpp>
#include <couponflux/combined.hpp>
#include <couponflux/engine.hpp>
#include <couponflux/errors.hpp>
#include <couponflux/harness.hpp>
#include <couponflux/qseries.hpp>
#include <couponflux/record.hpp>
#include <couponflux/reset.hpp>
#include <couponflux/rng.hpp>
#include <couponflux/version.hpp>

namespace cf = couponflux;

namespace {

int default_threads() {
    if (const char* e = std::getenv("COUPONFLUX_THREADS")) {
        int v = std::atoi(e);
        if (v >= 1) return v;
    }
    return 1;
}

// Step budget = multiplier / mu, saturating to unlimited (0) once it leaves
// uint64 range. Completion is checked before the budget, so a generous cap
// never distorts the completed samples.
std::uint64_t budget_from(double multiplier, double log_mu) {
    double v = std::exp(std::log(multiplier) - log_mu);
    if (!(v < 9.0e18)) return 0;
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(v)));
}

// Shared model parameter options; each model checks that exactly its own
// parameters were given.
struct ModelOpts {
    std::int64_t n = 0;
    double rho = 0, p = 0, q = 0, alpha = 0, beta = 0;
    CLI::Option *o_n = nullptr, *o_rho = nullptr, *o_p = nullptr, *o_q = nullptr,
                *o_alpha = nullptr, *o_beta = nullptr;

    void attach(CLI::App* sub) {
        o_n = sub->add_option("--n", n, "number of standard coupons");
        o_rho = sub->add_option("--rho", rho, "reset probability (reset model)");
        o_p = sub->add_option("--p", p, "per-draw loss probability (clumsy model)");
        o_q = sub->add_option("--q", q, "per-step retention probability (careless model)");
        o_alpha = sub->add_option("--alpha", alpha, "refresh failure rate (combined model)");
        o_beta = sub->add_option("--beta", beta, "per-step drop rate (combined model)");
    }

    std::map<std::string, double> collect(const std::string& model) const {
        struct Entry {
            const char* name;
            CLI::Option* opt;
            double value;
        };
        const Entry all[] = {{"rho", o_rho, rho},     {"p", o_p, p},       {"q", o_q, q},
                             {"alpha", o_alpha, alpha}, {"beta", o_beta, beta}};
        std::vector<std::string> wanted;
        if (model == "reset") wanted = {"rho"};
        else if (model == "clumsy") wanted = {"p"};
        else if (model == "careless") wanted = {"q"};
        else if (model == "combined") wanted = {"alpha", "beta"};
        else throw CLI::ValidationError("model must be reset, clumsy, careless, or combined");

        if (!o_n->count()) throw CLI::ValidationError(model + " requires --n");
        std::map<std::string, double> params;
        params["n"] = static_cast<double>(n);
        for (const auto& e : all) {
            bool want = std::find(wanted.begin(), wanted.end(), e.name) != wanted.end();
            if (want && !e.opt->count())
                throw CLI::ValidationError(model + " requires --" + e.name);
            if (!want && e.opt->count())
                throw CLI::ValidationError(model + " does not take --" + e.name);
            if (want) params[e.name] = e.value;
        }
        return params;
    }
};

void print_json(const cf::ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw cf::DomainError("cannot open output file " + out_path);
    f << j.dump(2) << "\n";
    std::printf("wrote %s\n", out_path.c_str());
}

// ---------------------------------------------------------------------------
// verify suites

struct Verifier {
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                    detail.empty() ? "" : "  ", detail.c_str());
        if (!ok) ++failures;
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void suite_identities(Verifier& v) {
    // Equal-reset closed form: rho = 1/(n+1) gives s = 1/(n+1), mean = n(n+1).
    {
        double worst_s = 0.0, worst_mean = 0.0;
        for (int n = 1; n <= 10; ++n) {
            cf::ResetParams p(n, 1.0 / (n + 1.0));
            cf::ResetSolution sol = cf::solve_reset(p);
            worst_s = std::max(worst_s, std::fabs(sol.s - 1.0 / (n + 1.0)));
            worst_mean = std::max(worst_mean, std::fabs(sol.mean - n * (n + 1.0)));
        }
        v.check("reset-equal-closed-form", worst_s <= 1e-12 && worst_mean <= 1e-9,
                fmt("worst ds=%.3g dmean=%.3g", worst_s, worst_mean));
    }

    // Three independent routes to the reset mean: inclusion-exclusion,
    // Beta-function form, and the day-level count kernel.
    {
        double worst = 0.0;
        for (int n : {2, 5, 8}) {
            for (double rho : {0.2, 0.35}) {
                cf::ResetParams p(n, rho);
                double m1 = cf::exact_mean(p);
                double m2 = cf::exact_mean_beta_form(p);
                double m3 = cf::mean_hitting_time(cf::reset_count_kernel(p),
                                                  cf::reset_completion_target(p), 0);
                worst = std::max(worst, std::fabs(m2 / m1 - 1.0));
                worst = std::max(worst, std::fabs(m3 / m1 - 1.0));
            }
        }
        v.check("reset-mean-triple-agreement", worst <= 1e-9, fmt("worst rel=%.3g", worst));
    }

    // Careless stationary law: the upward flux across every level cut equals
    // the downward flux, and the mean count equals q / (p + q/n).
    {
        double worst_cut = 0.0, worst_mean = 0.0;
        for (double q : {0.3, 0.5, 0.7}) {
            cf::CarelessParams par(100, q);
            cf::CountKernel K = cf::careless_kernel(par);
            cf::StationaryDistribution nu = cf::stationary_distribution(K);
            double mean = 0.0;
            for (int k = 0; k <= par.n; ++k) mean += k * nu.probs[k];
            for (int k = 0; k < par.n; ++k) {
                double up = nu.probs[k] * std::exp(cf::careless_log_cut_rate(par, k));
                double down = 0.0;
                for (int j = par.n; j > k; --j)
                    for (int i = 0; i <= k; ++i) down += nu.probs[j] * K(j, i);
                double m = std::max(up, down);
                if (m > 1e-280)
                    worst_cut = std::max(worst_cut, std::fabs(up - down) / m);
            }
            double mean_ref = q / ((1.0 - q) + q / par.n);
            worst_mean = std::max(worst_mean, std::fabs(mean / mean_ref - 1.0));
        }
        v.check("careless-cut-flux-balance", worst_cut <= 1e-10, fmt("worst rel=%.3g", worst_cut));
        v.check("careless-stationary-mean", worst_mean <= 1e-10, fmt("worst rel=%.3g", worst_mean));
    }

    // Two exact flux routes agree: outflow of the full state vs entry from
    // one below.
    {
        double worst = 0.0;
        for (int n : {4, 10, 20, 30}) {
            for (double q : {0.3, 0.5, 0.7}) {
                cf::FluxReport r = cf::careless_flux(cf::CarelessParams(n, q));
                worst = std::max(worst, std::fabs(r.log_exact - r.log_exact_alt));
            }
        }
        v.check("careless-flux-two-routes", worst <= 1e-10, fmt("worst dlog=%.3g", worst));
    }

    // Clumsy completion flux equals p q^n exactly.
    {
        double worst = 0.0;
        for (int n : {2, 6, 12, 20, 30}) {
            for (double p : {0.1, 0.5, 0.9}) {
                cf::FluxReport r = cf::clumsy_flux(cf::ClumsyParams(n, p));
                worst = std::max(worst, std::fabs(r.log_ratio));
            }
        }
        v.check("clumsy-flux-closed-form", worst <= 1e-10, fmt("worst dlog=%.3g", worst));
    }

    // q-Pochhammer: long partial products hit the infinite limit, and the
    // frozen reference value at q = 1/2.
    {
        double d1 = std::fabs(cf::log_q_pochhammer(0.5, 300) - cf::log_q_pochhammer_inf(0.5));
        double d2 = std::fabs(std::exp(cf::log_q_pochhammer_inf(0.5)) - 0.2887880950866025);
        v.check("pochhammer-partial-vs-infinite", d1 <= 1e-15, fmt("dlog=%.3g", d1));
        v.check("pochhammer-half-reference", d2 <= 1e-15, fmt("d=%.3g", d2));
    }

    // Weight-table recursion vs the direct product formula.
    {
        cf::LuckyWeightTable tab = cf::make_lucky_weight_table(50, 0.6, 0.8);
        double worst = 0.0;
        for (int k = 0; k <= 50; ++k)
            worst = std::max(worst, std::fabs(tab.log_w[k] - cf::log_lucky_weight(50, k, 0.6, 0.8)));
        v.check("lucky-weight-recursion", worst <= 1e-11, fmt("worst dlog=%.3g", worst));
    }

    // alpha = 0 reduces the combined kernel to the careless kernel row by row.
    {
        cf::CountKernel a = cf::combined_kernel(cf::CombinedParams(12, 0.0, 0.5));
        cf::CountKernel b = cf::careless_kernel(cf::CarelessParams(12, 0.5));
        double worst = 0.0;
        for (std::size_t i = 0; i < a.states(); ++i)
            for (std::size_t j = 0; j < a.states(); ++j)
                worst = std::max(worst, std::fabs(a(i, j) - b(i, j)));
        v.check("combined-reduces-to-careless", worst <= 1e-14, fmt("worst d=%.3g", worst));
    }

    // Saturated-chain stationary law is a proper distribution.
    {
        std::vector<double> pi = cf::infinite_chain_stationary(0.5, 0.8, 200);
        double total = 0.0;
        for (double x : pi) total += x;
        v.check("infinite-chain-mass", std::fabs(total - 1.0) <= 1e-12,
                fmt("deficit=%.3g", std::fabs(total - 1.0)));
    }
}

void suite_audits(Verifier& v) {
    {
        cf::ClumsyParams par(12, 0.7);
        std::uint64_t b = cf::default_block_length(par.n);
        std::uint64_t h = cf::default_audit_horizon(par.n, par.q());
        cf::AuditRecord rec = cf::hypothesis_audit(
            cf::clumsy_count_kernel(par), cf::clumsy_completion_target(), b, h,
            cf::clumsy_mixing_bound(par.n, static_cast<long long>(h)),
            std::pow(par.q(), par.n));
        v.check("clumsy-audit-n12", rec.all_pass,
                fmt("bmu=%.6g clump=%.6g burn=%.3g", rec.b_mu, rec.m2_over_m1,
                    rec.burn_in_bound));
    }
    {
        cf::CarelessParams par(10, 0.5);
        std::uint64_t b = cf::default_block_length(par.n);
        std::uint64_t h = cf::default_audit_horizon(par.n, par.q);
        cf::AuditRecord rec = cf::hypothesis_audit(
            cf::careless_kernel(par), cf::careless_completion_target(par), b, h,
            cf::careless_mixing_bound(par.n, par.q, static_cast<long long>(h)),
            std::pow(par.q, par.n));
        v.check("careless-audit-n10", rec.all_pass,
                fmt("bmu=%.6g clump=%.6g burn=%.3g", rec.b_mu, rec.m2_over_m1,
                    rec.burn_in_bound));
    }
}

void report_exp1(Verifier& v, const std::string& name, const cf::HittingSampleSet& set) {
    cf::LimitLawReport rep = cf::exp1_ks(set);
    v.check(name, rep.pass,
            fmt("ks=%.4f thr=%.4f censor=%.4f", rep.ks_statistic, rep.ks_threshold,
                rep.censor_fraction));
}

void suite_clumsy_exp1(Verifier& v, std::uint64_t seed, int threads) {
    cf::ClumsyParams par(10, 0.7);
    cf::BatchResult batch = cf::clumsy_hitting_batch(par, seed, 2000, threads);
    cf::FluxReport flux = cf::clumsy_flux(par);
    report_exp1(v, "clumsy-exp1-n10",
                cf::make_sample_set("clumsy", {{"n", 10}, {"p", 0.7}}, seed, flux.log_predicted,
                                    batch));
}

void suite_careless_exp1(Verifier& v, std::uint64_t seed, int threads) {
    cf::CarelessParams par(6, 0.5);
    cf::FluxReport flux = cf::careless_flux(par);
    std::uint64_t budget = budget_from(100.0, flux.log_exact);
    cf::BatchResult batch = cf::careless_hitting_batch(par, seed, 1200, budget, threads);
    report_exp1(v, "careless-exp1-n6",
                cf::make_sample_set("careless", {{"n", 6}, {"q", 0.5}}, seed, flux.log_exact,
                                    batch));
}

void suite_combined_exp1(Verifier& v, std::uint64_t seed, int threads) {
    cf::CombinedParams par(6, 0.2, 0.5);
    cf::FluxReport flux = cf::combined_flux(par);
    std::uint64_t budget = budget_from(100.0, flux.log_exact);
    cf::BatchResult batch = cf::combined_hitting_batch(par, seed, 1000, budget, threads);
    report_exp1(v, "combined-exp1-n6",
                cf::make_sample_set("combined", {{"n", 6}, {"alpha", 0.2}, {"beta", 0.5}}, seed,
                                    flux.log_exact, batch));
}

void suite_reset_rare(Verifier& v, std::uint64_t seed) {
    cf::ResetParams par(12, 0.3);
    cf::ResetSolution sol = cf::solve_reset(par);
    std::vector<std::uint64_t> t = cf::simulate_reset_batch(par, seed, 3000);
    cf::BatchResult batch;
    batch.samples = std::move(t);
    batch.censored.assign(batch.samples.size(), 0);
    cf::HittingSampleSet set =
        cf::make_sample_set("reset", {{"n", 12}, {"rho", 0.3}}, seed,
                            std::log(par.rho) + sol.log_s, batch);
    report_exp1(v, "reset-rare-exp1-n12", set);

    std::vector<double> x(set.samples.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::exp(set.log_normalization + std::log(static_cast<double>(set.samples[i])));
    cf::MomentReport mom = cf::moment_report(x, 2);
    double d1 = std::fabs(mom.rows[0].empirical - 1.0);
    double d2 = std::fabs(mom.rows[1].empirical / 2.0 - 1.0);
    v.check("reset-rare-moments", d1 <= 0.10 && d2 <= 0.15, fmt("d1=%.4f d2rel=%.4f", d1, d2));
}

void suite_reset_gumbel(Verifier& v, std::uint64_t seed) {
    const int n = 500;
    const double rho = 1.0 / (static_cast<double>(n) * n * std::log(static_cast<double>(n)));
    cf::ResetParams par(n, rho);
    std::vector<std::uint64_t> t = cf::simulate_reset_batch(par, seed, 4000);
    double worst = 0.0;
    for (double y : {0.0, 1.0}) {
        double cut = n * (std::log(static_cast<double>(n)) + y);
        std::size_t cnt = 0;
        for (auto ti : t)
            if (static_cast<double>(ti) <= cut) ++cnt;
        double emp = static_cast<double>(cnt) / static_cast<double>(t.size());
        worst = std::max(worst, std::fabs(emp - cf::gumbel_reference(y)));
    }
    v.check("reset-gumbel-cdf", worst <= 0.025, fmt("worst d=%.4f", worst));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupon-collector rare-event toolkit"};
    app.set_version_flag("--version", std::string(cf::kToolVersion));
    app.require_subcommand(1);
    int exit_code = 0;

    // exact
    auto* sub_exact = app.add_subcommand("exact", "closed-form quantities for one point");
    std::string exact_model;
    ModelOpts exact_opts;
    sub_exact->add_option("model", exact_model, "reset|clumsy|careless|combined")->required();
    exact_opts.attach(sub_exact);
    sub_exact->callback([&] {
        cf::ExperimentRecord rec;
        rec.model = exact_model;
        rec.params = exact_opts.collect(exact_model);
        cf::exact_bundle(rec);
        std::cout << cf::to_json(rec).dump(2) << "\n";
    });

    // flux
    auto* sub_flux = app.add_subcommand("flux", "stationary completion flux vs prediction");
    std::string flux_model;
    ModelOpts flux_opts;
    sub_flux->add_option("model", flux_model, "clumsy|careless|combined")->required();
    flux_opts.attach(sub_flux);
    sub_flux->callback([&] {
        if (flux_model == "reset")
            throw CLI::ValidationError("flux is defined for clumsy, careless, combined");
        auto params = flux_opts.collect(flux_model);
        cf::FluxReport r{};
        if (flux_model == "clumsy")
            r = cf::clumsy_flux(cf::ClumsyParams(static_cast<int>(params["n"]), params["p"]));
        else if (flux_model == "careless")
            r = cf::careless_flux(cf::CarelessParams(static_cast<int>(params["n"]), params["q"]));
        else
            r = cf::combined_flux(cf::CombinedParams(static_cast<int>(params["n"]),
                                                     params["alpha"], params["beta"]));
        cf::ordered_json j;
        j["model"] = flux_model;
        cf::ordered_json pj = cf::ordered_json::object();
        for (const auto& [k, val] : params) pj[k] = val;
        j["params"] = pj;
        j["log_exact"] = cf::encode_output_value(r.log_exact);
        j["log_exact_alt"] = cf::encode_output_value(r.log_exact_alt);
        j["log_predicted"] = cf::encode_output_value(r.log_predicted);
        j["log_ratio"] = r.log_ratio;
        if (std::fabs(r.log_exact) <= 700.0) j["mu"] = std::exp(r.log_exact);
        else j["log_space"] = true;
        j["tool_version"] = cf::kToolVersion;
        j["timestamp"] = cf::utc_timestamp();
        std::cout << j.dump(2) << "\n";
    });

    // simulate
    auto* sub_sim = app.add_subcommand("simulate", "draw hitting-time samples");
    std::string sim_model, sim_out, sim_mode = "direct";
    ModelOpts sim_opts;
    std::size_t sim_samples = 0;
    std::uint64_t sim_seed = cf::kDefaultSeed;
    double sim_mult = 100.0;
    int sim_threads = default_threads();
    sub_sim->add_option("model", sim_model, "reset|clumsy|careless|combined")->required();
    sim_opts.attach(sub_sim);
    sub_sim->add_option("--samples", sim_samples, "number of samples")->required();
    sub_sim->add_option("--seed", sim_seed, "rng seed");
    sub_sim->add_option("--out", sim_out, "write the sample set to this JSON file");
    sub_sim->add_option("--budget-multiplier", sim_mult,
                        "step budget as a multiple of 1/mu (careless, combined)");
    sub_sim->add_option("--threads", sim_threads, "worker threads");
    sub_sim->add_option("--mode", sim_mode, "reset sampler: direct|regenerative")
        ->check(CLI::IsMember({"direct", "regenerative"}));
    sub_sim->callback([&] {
        auto params = sim_opts.collect(sim_model);
        if (sim_samples < 1) throw CLI::ValidationError("--samples must be at least 1");
        if (sim_model != "reset" && sub_sim->count("--mode"))
            throw CLI::ValidationError("--mode applies to the reset model only");
        int n = static_cast<int>(params["n"]);
        cf::HittingSampleSet set;
        if (sim_model == "reset") {
            cf::ResetParams par(n, params["rho"]);
            cf::ResetSolution sol = cf::solve_reset(par);
            auto mode = sim_mode == "direct" ? cf::ResetSimMode::direct
                                             : cf::ResetSimMode::regenerative;
            cf::BatchResult batch;
            batch.samples = cf::simulate_reset_batch(par, sim_seed, sim_samples, mode);
            batch.censored.assign(sim_samples, 0);
            set = cf::make_sample_set("reset", params, sim_seed,
                                      std::log(par.rho) + sol.log_s, batch);
        } else if (sim_model == "clumsy") {
            cf::ClumsyParams par(n, params["p"]);
            cf::BatchResult batch = cf::clumsy_hitting_batch(par, sim_seed, sim_samples,
                                                             sim_threads);
            set = cf::make_sample_set("clumsy", params, sim_seed,
                                      cf::clumsy_flux(par).log_exact, batch);
        } else if (sim_model == "careless") {
            cf::CarelessParams par(n, params["q"]);
            double log_mu = cf::careless_flux(par).log_exact;
            cf::BatchResult batch = cf::careless_hitting_batch(
                par, sim_seed, sim_samples, budget_from(sim_mult, log_mu), sim_threads);
            set = cf::make_sample_set("careless", params, sim_seed, log_mu, batch);
        } else {
            cf::CombinedParams par(n, params["alpha"], params["beta"]);
            double log_mu = cf::combined_flux(par).log_exact;
            cf::BatchResult batch = cf::combined_hitting_batch(
                par, sim_seed, sim_samples, budget_from(sim_mult, log_mu), sim_threads);
            set = cf::make_sample_set("combined", params, sim_seed, log_mu, batch);
        }
        print_json(cf::to_json(set), sim_out);
    });

    // qseries
    auto* sub_q = app.add_subcommand("qseries", "q-Pochhammer table");
    double q_value = 0.0;
    int q_terms = 0;
    sub_q->add_option("--q", q_value, "base in (0,1)")->required();
    sub_q->add_option("--k", q_terms, "largest partial product order")->required();
    sub_q->callback([&] {
        if (q_terms < 0) throw CLI::ValidationError("--k must be nonnegative");
        if (!(q_value > 0.0 && q_value < 1.0))
            throw cf::DomainError("q must lie in (0,1)");
        std::printf("q = %.17g\n", q_value);
        std::printf("%-6s %-24s %s\n", "r", "log_pochhammer", "pochhammer");
        for (int r = 0; r <= q_terms; ++r) {
            double lv = cf::log_q_pochhammer(q_value, r);
            std::printf("%-6d %-24.16g %.16g\n", r, lv, std::exp(lv));
        }
        double li = cf::log_q_pochhammer_inf(q_value);
        std::printf("%-6s %-24.16g %.16g\n", "inf", li, std::exp(li));
    });

    // sweep
    auto* sub_sweep = app.add_subcommand("sweep", "run a parameter sweep from a plan file");
    std::string plan_path, out_dir = ".";
    bool sweep_csv = false;
    sub_sweep->add_option("--plan", plan_path, "sweep plan JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sub_sweep->add_option("--out-dir", out_dir, "directory for record files");
    sub_sweep->add_flag("--csv", sweep_csv, "write flattened CSV records instead of JSON");
    sub_sweep->callback([&] {
        std::ifstream f(plan_path);
        cf::SweepPlan plan = cf::plan_from_json(cf::ordered_json::parse(f));
        std::vector<cf::ExperimentRecord> records = cf::sweep(plan);
        std::filesystem::create_directories(out_dir);
        for (std::size_t i = 0; i < records.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "record-%05zu.%s", i, sweep_csv ? "csv" : "json");
            std::ofstream out(std::filesystem::path(out_dir) / name);
            if (!out) throw cf::DomainError("cannot write record file in " + out_dir);
            if (sweep_csv) out << cf::to_csv(records[i]);
            else out << cf::to_json(records[i]).dump(2) << "\n";
        }
        std::printf("wrote %zu records to %s\n", records.size(), out_dir.c_str());
    });

    // verify
    auto* sub_verify = app.add_subcommand("verify", "run a self-check suite");
    std::string suite;
    std::uint64_t verify_seed = cf::kDefaultSeed;
    int verify_threads = default_threads();
    sub_verify
        ->add_option("suite", suite,
                     "identities|audits|clumsy-exp1|careless-exp1|combined-exp1|"
                     "reset-rare|reset-gumbel")
        ->required();
    sub_verify->add_option("--seed", verify_seed, "rng seed for the sampling suites");
    sub_verify->add_option("--threads", verify_threads, "worker threads");
    sub_verify->callback([&] {
        Verifier v;
        std::printf("suite: %s\n", suite.c_str());
        std::printf("seed: %" PRIu64 "\n", verify_seed);
        if (suite == "identities") suite_identities(v);
        else if (suite == "audits") suite_audits(v);
        else if (suite == "clumsy-exp1") suite_clumsy_exp1(v, verify_seed, verify_threads);
        else if (suite == "careless-exp1") suite_careless_exp1(v, verify_seed, verify_threads);
        else if (suite == "combined-exp1") suite_combined_exp1(v, verify_seed, verify_threads);
        else if (suite == "reset-rare") suite_reset_rare(v, verify_seed);
        else if (suite == "reset-gumbel") suite_reset_gumbel(v, verify_seed);
        else throw CLI::ValidationError("unknown suite " + suite);
        std::printf("%s: %d check(s) failed\n", v.failures ? "FAIL" : "OK", v.failures);
        exit_code = v.failures ? 1 : 0;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const cf::Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
