#include "lhvt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lhvt/version.hpp"

namespace lhvt {

namespace {

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

nlohmann::ordered_json vec_json(const UnitVec3& v) {
    return nlohmann::ordered_json::array({v.x, v.y, v.z});
}

double sample_stderr(double sum, double sum_sq, std::uint64_t n) {
    if (n < 2) return 0.0;
    double mean = sum / static_cast<double>(n);
    double var = sum_sq / static_cast<double>(n) - mean * mean;
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

Check sigma_check(std::string name, double value, double target, double stderr_value,
                  double max_sigmas) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    if (stderr_value > 0.0) {
        c.sigmas = std::abs(value - target) / stderr_value;
        c.tolerance = max_sigmas * stderr_value;
        c.pass = c.sigmas <= max_sigmas;
    } else {
        c.sigmas = value == target ? 0.0 : std::numeric_limits<double>::infinity();
        c.tolerance = 0.0;
        c.pass = value == target;
    }
    return c;
}

Check abs_check(std::string name, double value, double target, double tolerance) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.target = target;
    c.tolerance = tolerance;
    c.sigmas = 0.0;
    c.pass = std::abs(value - target) <= tolerance;
    return c;
}

bool StatsReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* StatsReport::first_failure() const {
    for (const Check& c : checks) {
        if (!c.pass) return &c;
    }
    return nullptr;
}

void StatsReport::add_quantity(std::string name, double value) {
    quantities.emplace_back(std::move(name), value);
}

nlohmann::ordered_json StatsReport::to_json(bool with_timestamp) const {
    nlohmann::ordered_json j;
    j["schema"] = report_schema;
    j["mode"] = mode;
    nlohmann::ordered_json meta;
    meta["seed"] = master_seed;
    meta["trials"] = trials;
    meta["generator"] = generator_name;
    meta["version"] = version_string;
    if (with_timestamp) meta["timestamp"] = iso_timestamp();
    j["metadata"] = meta;
    j["inputs"] = inputs;
    nlohmann::ordered_json q;
    for (const auto& [name, value] : quantities) q[name] = value;
    j["quantities"] = q;
    nlohmann::ordered_json cj = nlohmann::ordered_json::array();
    for (const Check& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["value"] = c.value;
        e["target"] = c.target;
        e["tolerance"] = c.tolerance;
        e["sigmas"] = c.sigmas;
        e["pass"] = c.pass;
        cj.push_back(e);
    }
    j["checks"] = cj;
    j["pass"] = all_pass();
    return j;
}

std::string StatsReport::to_csv() const {
    std::ostringstream out;
    out << "kind,name,value,target,tolerance,sigmas,pass\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& [name, value] : quantities) {
        out << "quantity," << name << ',' << num(value) << ",,,,\n";
    }
    for (const Check& c : checks) {
        out << "check," << c.name << ',' << num(c.value) << ',' << num(c.target) << ','
            << num(c.tolerance) << ',' << num(c.sigmas) << ',' << (c.pass ? "true" : "false")
            << '\n';
    }
    return out.str();
}

unsigned effective_workers() {
    if (const char* env = std::getenv("LHVT_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(std::min(v, 64L));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return std::clamp(hw, 1u, 64u);
}

std::pair<UnitVec3, UnitVec3> resolve_vectors(const ExperimentConfig& config) {
    SplitMix64 rng(derive_seed(config.master_seed, 0, stream_tag::vectors));
    UnitVec3 drawn_a = sample_unit_vector(rng);
    UnitVec3 drawn_b = sample_unit_vector(rng);
    return {config.a.value_or(drawn_a), config.b.value_or(drawn_b)};
}

// --- von Neumann -------------------------------------------------------------

namespace {

struct VnAccum {
    std::uint64_t plus = 0;
    std::uint64_t k_sum = 0;
    double bits_sum = 0.0;
    double bits_sq = 0.0;

    void merge(const VnAccum& o) {
        plus += o.plus;
        k_sum += o.k_sum;
        bits_sum += o.bits_sum;
        bits_sq += o.bits_sq;
    }
};

}  // namespace

StatsReport verify_vn(const ExperimentConfig& config) {
    auto [a, b] = resolve_vectors(config);
    const std::uint64_t n = config.trials;
    BlochState state{a};
    VnMeasurement meas{b};

    VnAccum acc = run_sessions<VnAccum>(n, [&](std::uint64_t i, VnAccum& s) {
        std::uint64_t ss = session_seed(config.master_seed, i);
        VnResult r = run_vn_session(state, meas, ss);
        if (r.outcome > 0) ++s.plus;
        s.k_sum += r.transcript.messages.front().k;
        double bits = ideal_codelength(r.transcript, shared_stream(ss));
        s.bits_sum += bits;
        s.bits_sq += bits * bits;
    });

    double freq = static_cast<double>(acc.plus) / static_cast<double>(n);
    double target = 0.5 * (1.0 + dot(a, b));
    double se = std::sqrt(std::max(target * (1.0 - target), 0.0) / static_cast<double>(n));
    double mean_bits = acc.bits_sum / static_cast<double>(n);
    double bits_se = sample_stderr(acc.bits_sum, acc.bits_sq, n);
    double mean_k = static_cast<double>(acc.k_sum) / static_cast<double>(n);
    const EntropyReport& er = entropy_report();

    StatsReport rep;
    rep.mode = "vn";
    rep.master_seed = config.master_seed;
    rep.trials = n;
    rep.inputs["a"] = vec_json(a);
    rep.inputs["b"] = vec_json(b);
    rep.add_quantity("freq_plus", freq);
    rep.add_quantity("count_plus", static_cast<double>(acc.plus));
    rep.add_quantity("target_plus", target);
    rep.add_quantity("mean_k", mean_k);
    rep.add_quantity("acceptance_rate", 1.0 / mean_k);
    rep.add_quantity("mean_ideal_bits", mean_bits);
    rep.checks.push_back(
        sigma_check("vn_plus_frequency", freq, target, se, config.tolerance_sigmas));
    rep.checks.push_back(abs_check("mean_ideal_bits_vs_h", mean_bits, er.h,
                                   std::max(0.01, config.tolerance_sigmas * bits_se)));
    return rep;
}

// --- singlet -----------------------------------------------------------------

namespace {

struct SingletAccum {
    std::uint64_t alpha_plus = 0;
    std::uint64_t beta_plus = 0;
    std::int64_t prod_sum = 0;
    double bits_sum = 0.0;
    double bits_sq = 0.0;

    void merge(const SingletAccum& o) {
        alpha_plus += o.alpha_plus;
        beta_plus += o.beta_plus;
        prod_sum += o.prod_sum;
        bits_sum += o.bits_sum;
        bits_sq += o.bits_sq;
    }
};

}  // namespace

StatsReport verify_singlet(const ExperimentConfig& config) {
    auto [a, b] = resolve_vectors(config);
    const std::uint64_t n = config.trials;
    BlochState state{a};
    VnMeasurement meas{b};

    SingletAccum acc = run_sessions<SingletAccum>(n, [&](std::uint64_t i, SingletAccum& s) {
        std::uint64_t ss = session_seed(config.master_seed, i);
        SingletResult r = run_singlet_session(state, meas, ss);
        if (r.alpha > 0) ++s.alpha_plus;
        if (r.beta > 0) ++s.beta_plus;
        s.prod_sum += r.alpha * r.beta;
        double bits = ideal_codelength(r.transcript, shared_stream(ss));
        s.bits_sum += bits;
        s.bits_sq += bits * bits;
    });

    double nd = static_cast<double>(n);
    double corr = static_cast<double>(acc.prod_sum) / nd;
    double corr_target = -dot(a, b);
    double corr_se = std::sqrt(std::max(1.0 - corr_target * corr_target, 0.0) / nd);
    double alpha_freq = static_cast<double>(acc.alpha_plus) / nd;
    double beta_freq = static_cast<double>(acc.beta_plus) / nd;
    double marg_se = 0.5 / std::sqrt(nd);
    double mean_bits = acc.bits_sum / nd;
    double bits_se = sample_stderr(acc.bits_sum, acc.bits_sq, n);
    const EntropyReport& er = entropy_report();

    StatsReport rep;
    rep.mode = "singlet";
    rep.master_seed = config.master_seed;
    rep.trials = n;
    rep.inputs["a"] = vec_json(a);
    rep.inputs["b"] = vec_json(b);
    rep.add_quantity("correlator", corr);
    rep.add_quantity("correlator_target", corr_target);
    rep.add_quantity("alpha_plus_freq", alpha_freq);
    rep.add_quantity("beta_plus_freq", beta_freq);
    rep.add_quantity("mean_ideal_bits", mean_bits);
    rep.checks.push_back(
        sigma_check("singlet_correlator", corr, corr_target, corr_se, config.tolerance_sigmas));
    rep.checks.push_back(
        sigma_check("alpha_marginal", alpha_freq, 0.5, marg_se, config.tolerance_sigmas));
    rep.checks.push_back(
        sigma_check("beta_marginal", beta_freq, 0.5, marg_se, config.tolerance_sigmas));
    rep.checks.push_back(abs_check("mean_ideal_bits_vs_h", mean_bits, er.singlet_bits,
                                   std::max(0.01, config.tolerance_sigmas * bits_se)));
    return rep;
}

// --- POVM --------------------------------------------------------------------

namespace {

struct PovmAccum {
    std::vector<std::uint64_t> counts;
    std::uint64_t iter_sum = 0;
    double iter_sq = 0.0;
    double bits_sum = 0.0;
    double bits_sq = 0.0;

    void merge(const PovmAccum& o) {
        if (counts.size() < o.counts.size()) counts.resize(o.counts.size(), 0);
        for (std::size_t j = 0; j < o.counts.size(); ++j) counts[j] += o.counts[j];
        iter_sum += o.iter_sum;
        iter_sq += o.iter_sq;
        bits_sum += o.bits_sum;
        bits_sq += o.bits_sq;
    }
};

}  // namespace

StatsReport verify_povm(const ExperimentConfig& config, const Povm& povm) {
    if (auto err = validate_povm(povm)) {
        throw std::invalid_argument("invalid POVM: " + *err);
    }
    auto [a, b_unused] = resolve_vectors(config);
    (void)b_unused;
    const std::uint64_t n = config.trials;
    const std::size_t m = povm.elements.size();
    BlochState state{a};

    PovmAccum acc = run_sessions<PovmAccum>(n, [&](std::uint64_t i, PovmAccum& s) {
        if (s.counts.empty()) s.counts.resize(m, 0);
        std::uint64_t ss = session_seed(config.master_seed, i);
        PovmResult r = run_povm_session(state, povm, ss);
        ++s.counts[r.element];
        double iters = static_cast<double>(r.transcript.iterations);
        s.iter_sum += r.transcript.iterations;
        s.iter_sq += iters * iters;
        // Naive accounting: ideal message bits plus one sign bit and one
        // reply bit per iteration.
        double bits = ideal_codelength(r.transcript, shared_stream(ss)) + 2.0 * iters;
        s.bits_sum += bits;
        s.bits_sq += bits * bits;
    });
    if (acc.counts.empty()) acc.counts.resize(m, 0);

    double nd = static_cast<double>(n);
    double mean_iters = static_cast<double>(acc.iter_sum) / nd;
    double iter_se = sample_stderr(static_cast<double>(acc.iter_sum), acc.iter_sq, n);
    double mean_bits = acc.bits_sum / nd;
    double bits_se = sample_stderr(acc.bits_sum, acc.bits_sq, n);
    const EntropyReport& er = entropy_report();

    StatsReport rep;
    rep.mode = "povm";
    rep.master_seed = config.master_seed;
    rep.trials = n;
    rep.inputs["a"] = vec_json(a);
    nlohmann::ordered_json pj = nlohmann::ordered_json::array();
    for (const PovmElement& e : povm.elements) {
        pj.push_back(nlohmann::ordered_json::array({e.bvec.x, e.bvec.y, e.bvec.z}));
    }
    rep.inputs["povm"] = pj;

    for (std::size_t j = 0; j < m; ++j) {
        double freq = static_cast<double>(acc.counts[j]) / nd;
        double target = 0.5 * (povm.elements[j].weight + dot(Vec3{a.x, a.y, a.z}, povm.elements[j].bvec));
        double se = std::sqrt(std::max(target * (1.0 - target), 0.0) / nd);
        rep.add_quantity("freq_" + std::to_string(j), freq);
        rep.add_quantity("target_" + std::to_string(j), target);
        rep.checks.push_back(sigma_check("povm_freq_" + std::to_string(j), freq, target, se,
                                         config.tolerance_sigmas));
    }
    rep.add_quantity("mean_iterations", mean_iters);
    rep.add_quantity("mean_total_bits", mean_bits);
    rep.add_quantity("expected_total_bits", er.total_povm);
    rep.checks.push_back(abs_check("mean_iterations", mean_iters, 2.0,
                                   std::max(0.01, config.tolerance_sigmas * iter_se)));
    rep.checks.push_back(sigma_check("mean_total_bits_vs_identity", mean_bits, er.total_povm,
                                     bits_se, config.tolerance_sigmas));
    return rep;
}

// --- entropy -----------------------------------------------------------------

StatsReport run_entropy_mode(const ExperimentConfig& config) {
    const EntropyReport& er = entropy_report();
    const ZoneAverages& avgs = zone_prob_averages();

    StatsReport rep;
    rep.mode = "entropy";
    rep.master_seed = config.master_seed;
    rep.trials = 0;
    rep.inputs["entropy_report"] = er.to_json();
    rep.add_quantity("p_A", er.p_a);
    rep.add_quantity("p_R", er.p_r);
    rep.add_quantity("q_A_lambda", er.q_a_lambda);
    rep.add_quantity("q_A_mu", er.q_a_mu);
    rep.add_quantity("q_A_nu", er.q_a_nu);
    rep.add_quantity("q_R", er.q_r);
    rep.add_quantity("H", er.h);
    rep.add_quantity("total_vn", er.total_vn);
    rep.add_quantity("singlet_bits", er.singlet_bits);
    rep.add_quantity("total_povm", er.total_povm);

    // Internal identities and closed-form anchors.
    rep.checks.push_back(abs_check("p_a_plus_p_r", er.p_a + er.p_r, 1.0, 1e-9));
    rep.checks.push_back(abs_check("h_identity", er.h * er.p_a,
                                   er.q_a_lambda + er.q_a_mu + er.q_a_nu + er.q_r, 1e-9));
    rep.checks.push_back(
        abs_check("avg_lambda_closed_form", avgs.a_lambda, 1.0 / (2.0 * sqrt3), 1e-5));
    rep.checks.push_back(abs_check("acceptance_avg", er.p_a, sqrt3 / 2.0, 3e-5));
    rep.checks.push_back(abs_check("reject_avg_quadrature", avgs.r, (2.0 - sqrt3) / 2.0, 3e-5));

    // Explicit geometric-series form of the conditional entropy, truncated at
    // k = 200, must agree with the closed form (q_A + q_R) / p_A.
    double series = 0.0;
    double p_r = 1.0 - (avgs.a_lambda + avgs.a_mu + avgs.a_nu);
    double p_al[3] = {avgs.a_lambda, avgs.a_mu, avgs.a_nu};
    double q_al[3] = {er.q_a_lambda, er.q_a_mu, er.q_a_nu};
    for (int k = 1; k <= 200; ++k) {
        double pr_km1 = std::pow(p_r, k - 1);
        double pr_km2 = k >= 2 ? std::pow(p_r, k - 2) : 0.0;
        for (int l = 0; l < 3; ++l) {
            if (k >= 2) series += (k - 1) * pr_km2 * p_al[l] * er.q_r;
            series += pr_km1 * q_al[l];
        }
    }
    rep.checks.push_back(abs_check("entropy_series_truncated", series, er.h, 1e-9));
    rep.checks.push_back(abs_check("total_vn_identity", er.total_vn, er.h + 1.0, 1e-12));
    rep.checks.push_back(
        abs_check("total_povm_identity", er.total_povm, 2.0 * (er.total_vn + 1.0), 1e-12));
    return rep;
}

// --- coding ------------------------------------------------------------------

StatsReport run_coding_mode(const ExperimentConfig& config) {
    const std::uint64_t n = config.trials;
    std::vector<AliceMessage> messages(n);
    struct GenAccum {
        double naive_bits = 0.0;
        double ideal_bits = 0.0;
        void merge(const GenAccum& o) {
            naive_bits += o.naive_bits;
            ideal_bits += o.ideal_bits;
        }
    };
    GenAccum gen = run_sessions<GenAccum>(n, [&](std::uint64_t i, GenAccum& s) {
        std::uint64_t ss = session_seed(config.master_seed, i);
        SplitMix64 vec_rng(derive_seed(ss, 0, stream_tag::vectors));
        BlochState a{sample_unit_vector(vec_rng)};
        LhvStream stream = shared_stream(ss);
        AliceSelection sel = alice_select(a, stream);
        messages[i] = sel.message;
        s.naive_bits += static_cast<double>(naive_message_bits(sel.message));
        SessionTranscript t;
        t.messages.push_back(sel.message);
        s.ideal_bits += ideal_codelength(t, stream);
    });

    StreamAccess streams = streams_for_master(config.master_seed);
    CodedBlock block = encode_block(messages, streams);
    std::vector<std::uint8_t> wire = block.serialize();
    CodedBlock reparsed = CodedBlock::deserialize(wire);
    std::vector<AliceMessage> decoded = decode_block(reparsed, streams);
    bool lossless = decoded.size() == messages.size();
    for (std::size_t i = 0; lossless && i < messages.size(); ++i) {
        lossless = decoded[i].k == messages[i].k && decoded[i].label == messages[i].label &&
                   decoded[i].sign == messages[i].sign;
    }

    double nd = static_cast<double>(n);
    double coded_rate = static_cast<double>(block.payload_bits) / nd;
    double naive_rate = gen.naive_bits / nd;
    double ideal_rate = gen.ideal_bits / nd;
    const EntropyReport& er = entropy_report();

    StatsReport rep;
    rep.mode = "coding";
    rep.master_seed = config.master_seed;
    rep.trials = n;
    rep.add_quantity("payload_bits", static_cast<double>(block.payload_bits));
    rep.add_quantity("coded_bits_per_session", coded_rate);
    rep.add_quantity("sign_bits_per_session", 1.0);
    rep.add_quantity("total_bits_per_session", coded_rate + 1.0);
    rep.add_quantity("mean_ideal_bits", ideal_rate);
    rep.add_quantity("naive_bits_per_session", naive_rate + 1.0);
    rep.add_quantity("h_reference", er.h);
    rep.add_quantity("block_bytes", static_cast<double>(wire.size()));

    Check lossless_check;
    lossless_check.name = "roundtrip_lossless";
    lossless_check.value = lossless ? 1.0 : 0.0;
    lossless_check.target = 1.0;
    lossless_check.tolerance = 0.0;
    lossless_check.pass = lossless;
    rep.checks.push_back(lossless_check);
    // Coder overhead budget over the conditional entropy: 0.05 bits/session.
    rep.checks.push_back(abs_check("coded_rate_vs_h", coded_rate, er.h, 0.05));
    Check gain;
    gain.name = "coded_beats_naive";
    gain.value = naive_rate + 1.0 - (coded_rate + 1.0);
    gain.target = 0.0;
    gain.tolerance = 0.0;
    gain.sigmas = 0.0;
    gain.pass = gain.value > 0.0;
    rep.checks.push_back(gain);
    return rep;
}

// --- fidelity ----------------------------------------------------------------

StatsReport run_fidelity_mode(const ExperimentConfig& config) {
    const EntropyReport& er = entropy_report();
    StatsReport rep;
    rep.mode = "fidelity";
    rep.master_seed = config.master_seed;
    rep.trials = 0;

    const double budgets[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.19, er.total_vn};
    for (double b : budgets) {
        char name[48];
        std::snprintf(name, sizeof name, "fidelity_at_%.6g", b);
        rep.add_quantity(name, fidelity_budget(b).value);
    }
    rep.add_quantity("total_vn", er.total_vn);

    rep.checks.push_back(abs_check("fidelity_at_zero", fidelity_budget(0.0).value, 0.5, 1e-12));
    rep.checks.push_back(
        abs_check("fidelity_at_total", fidelity_budget(er.total_vn).value, 1.0, 1e-12));
    bool monotone = true;
    double prev = -1.0;
    for (double b = 0.0; b <= er.total_vn + 1e-9; b += er.total_vn / 64.0) {
        double f = fidelity_budget(std::min(b, er.total_vn)).value;
        if (f < prev) monotone = false;
        prev = f;
    }
    Check mono;
    mono.name = "fidelity_monotone";
    mono.value = monotone ? 1.0 : 0.0;
    mono.target = 1.0;
    mono.pass = monotone;
    rep.checks.push_back(mono);
    Check clamp;
    clamp.name = "over_budget_clamps";
    FidelityBudget over = fidelity_budget(er.total_vn + 1.0);
    clamp.value = over.value;
    clamp.target = 1.0;
    clamp.pass = over.clamped && over.value == 1.0;
    rep.checks.push_back(clamp);
    return rep;
}

// --- inputs ------------------------------------------------------------------

Povm load_povm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open POVM file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("POVM file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("POVM file must be a JSON array of 3-vectors");
    }
    std::vector<Vec3> vectors;
    vectors.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() ||
            !e[2].is_number()) {
            throw std::invalid_argument("POVM file entries must be numeric 3-vectors");
        }
        vectors.push_back(Vec3{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    }
    Povm p = Povm::from_vectors(vectors);
    if (auto err = validate_povm(p)) {
        throw std::invalid_argument("invalid POVM: " + *err);
    }
    return p;
}

UnitVec3 parse_unit_vector(const std::string& text) {
    double x = 0, y = 0, z = 0;
    char trailing = 0;
    int got = std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &x, &y, &z, &trailing);
    if (got != 3) {
        throw std::invalid_argument("expected vector as x,y,z: " + text);
    }
    return normalized(Vec3{x, y, z});
}

// --- CLI ---------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Classical simulation of qubit transmission over shared randomness"};
    app.name("lhvt");

    std::string mode_str = "vn";
    std::string a_str, b_str, povm_path, format_str = "json";
    std::uint64_t seed = 1;
    std::uint64_t trials = 0;
    double sigmas = 4.0;

    app.add_option("--mode", mode_str, "vn | singlet | povm | entropy | coding | fidelity")
        ->check(CLI::IsMember({"vn", "singlet", "povm", "entropy", "coding", "fidelity"}));
    app.add_option("--seed", seed, "master seed (64-bit)");
    app.add_option("--trials", trials, "session count (default 100000 for statistical modes)")
        ->check(CLI::PositiveNumber);
    app.add_option("--a", a_str, "state vector x,y,z (normalized on input)");
    app.add_option("--b", b_str, "measurement vector x,y,z (normalized on input)");
    app.add_option("--povm", povm_path, "path to JSON POVM file (array of 3-vectors)");
    app.add_option("--format", format_str, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--sigmas", sigmas, "statistical gate in standard errors (default 4)");

    std::vector<const char*> argv;
    argv.push_back("lhvt");
    for (const std::string& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    ExperimentConfig config;
    config.master_seed = seed;
    config.tolerance_sigmas = sigmas;
    config.format = format_str == "csv" ? ReportFormat::csv : ReportFormat::json;

    try {
        if (mode_str == "vn") config.mode = Mode::vn;
        else if (mode_str == "singlet") config.mode = Mode::singlet;
        else if (mode_str == "povm") config.mode = Mode::povm;
        else if (mode_str == "entropy") config.mode = Mode::entropy;
        else if (mode_str == "coding") config.mode = Mode::coding;
        else config.mode = Mode::fidelity;

        config.trials = trials > 0 ? trials : 100'000;
        if (!(sigmas > 0.0)) throw std::invalid_argument("--sigmas must be positive");
        if (!a_str.empty()) config.a = parse_unit_vector(a_str);
        if (!b_str.empty()) config.b = parse_unit_vector(b_str);
        config.povm_path = povm_path;

        StatsReport rep;
        switch (config.mode) {
            case Mode::vn: rep = verify_vn(config); break;
            case Mode::singlet: rep = verify_singlet(config); break;
            case Mode::povm: {
                if (config.povm_path.empty()) {
                    throw std::invalid_argument("--mode povm requires --povm <file>");
                }
                rep = verify_povm(config, load_povm_file(config.povm_path));
                break;
            }
            case Mode::entropy: rep = run_entropy_mode(config); break;
            case Mode::coding: rep = run_coding_mode(config); break;
            case Mode::fidelity: rep = run_fidelity_mode(config); break;
        }

        if (config.format == ReportFormat::csv) {
            out << rep.to_csv();
        } else {
            out << rep.to_json().dump(2) << "\n";
        }
        if (!rep.all_pass()) {
            const Check* c = rep.first_failure();
            err << "FAIL: " << (c ? c->name : "unknown check") << "\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace lhvt
