#include "mmcs/config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mmcs {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: field '" + field + "': " + why);
}

int parse_int(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        fail(field, "expected an integer, got '" + v + "'");
    }
}

double parse_real(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        fail(field, "expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        fail(field, "expected an unsigned integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(field, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) out.push_back(item);
    if (out.empty()) out.push_back("");
    return out;
}

std::vector<int> parse_int_list(const std::string& field, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(parse_int(field, s));
    return out;
}

std::vector<double> parse_real_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_real(field, s));
    return out;
}

TrainingScheme parse_scheme(const std::string& v) {
    if (v == "random-phase") return TrainingScheme::RandomPhase;
    if (v == "dft-subset") return TrainingScheme::DftSubset;
    fail("scheme", "expected random-phase or dft-subset, got '" + v + "'");
}

const char* scheme_name(TrainingScheme s) {
    return s == TrainingScheme::RandomPhase ? "random-phase" : "dft-subset";
}

void apply_key(RunConfig& cfg, const std::string& k, const std::string& v) {
    auto& m = cfg.mse;
    auto& r = cfg.rate;
    if (k == "experiment") {
        if (v != "mse" && v != "rate" && v != "complexity")
            fail(k, "expected mse, rate or complexity, got '" + v + "'");
        cfg.experiment = v;
    } else if (k == "out") {
        cfg.out = v;
    } else if (k == "format") {
        cfg.format = v;
    } else if (k == "plot_out") {
        cfg.plot_out = v;
    } else if (k == "n_t") {
        m.n_t = r.n_t = parse_int(k, v);
    } else if (k == "n_r") {
        m.n_r = r.n_r = parse_int(k, v);
    } else if (k == "l") {
        m.l = r.l = parse_int(k, v);
    } else if (k == "delta_deg") {
        m.delta_deg = r.delta_deg = parse_real(k, v);
    } else if (k == "delta_est_deg") {
        m.delta_est_deg = r.delta_est_deg = parse_real(k, v);
    } else if (k == "rho") {
        m.rho = r.rho = parse_real(k, v);
    } else if (k == "pathloss") {
        m.pathloss = r.pathloss = parse_real(k, v);
    } else if (k == "m") {
        m.m_list = r.m_list = parse_int_list(k, v);
    } else if (k == "scheme") {
        m.scheme = r.scheme = parse_scheme(v);
    } else if (k == "g_t") {
        m.g_t = r.g_t = parse_int(k, v);
    } else if (k == "g_r") {
        m.g_r = r.g_r = parse_int(k, v);
    } else if (k == "g_bar_t") {
        m.g_bar_t = r.g_bar_t = parse_int(k, v);
    } else if (k == "g_bar_r") {
        m.g_bar_r = r.g_bar_r = parse_int(k, v);
    } else if (k == "cosamp_iters") {
        m.solver.cosamp_iters = r.solver.cosamp_iters = parse_int(k, v);
    } else if (k == "iht_iters") {
        m.solver.iht_iters = r.solver.iht_iters = parse_int(k, v);
    } else if (k == "step_size") {
        m.solver.step_size = r.solver.step_size = parse_real(k, v);
    } else if (k == "residual_tol") {
        m.solver.residual_tol = r.solver.residual_tol = parse_real(k, v);
    } else if (k == "normalize_columns") {
        m.solver.normalize_columns = r.solver.normalize_columns = parse_bool(k, v);
    } else if (k == "safeguard_step") {
        m.solver.safeguard_step = r.solver.safeguard_step = parse_bool(k, v);
    } else if (k == "adaptive_step") {
        m.solver.adaptive_step = r.solver.adaptive_step = parse_bool(k, v);
    } else if (k == "scenarios") {
        m.scenarios.clear();
        for (const auto& s : split_list(v)) m.scenarios.push_back(noise_scenario(s));
    } else if (k == "snr_db") {
        r.snr_db_list = parse_real_list(k, v);
        m.scenarios.clear();
        for (double s : r.snr_db_list) m.scenarios.push_back({"custom", s});
    } else if (k == "training_snr_db") {
        r.training_snr_db = parse_real(k, v);
    } else if (k == "constant_modulus") {
        r.constant_modulus = parse_bool(k, v);
    } else if (k == "include_full_greedy") {
        r.include_full_greedy = parse_bool(k, v);
    } else if (k == "blocks") {
        m.blocks = r.blocks = parse_int(k, v);
    } else if (k == "realizations") {
        m.realizations = r.realizations = parse_int(k, v);
    } else if (k == "seed") {
        m.seed = r.seed = parse_u64(k, v);
    } else {
        throw std::invalid_argument("config: unknown key '" + k + "'");
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_reals(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::string csv_row(const ExperimentRecord& r) {
    std::ostringstream os;
    os << r.estimator << ',' << r.m << ',' << r.n_t << ',' << r.n_r << ',' << r.l << ',' << r.g_t
       << ',' << r.g_r << ',' << r.g_bar_t << ',' << r.g_bar_r << ',' << r.scenario << ','
       << format_double(r.snr_db) << ',' << r.blocks << ',' << r.realizations << ','
       << format_double(r.mean_mse) << ',' << format_double(r.mean_mse_db) << ','
       << format_double(r.mean_rate) << ',' << r.op_count_init << ',' << r.op_count_tracking
       << ',' << format_double(r.mean_iters_init) << ',' << format_double(r.mean_iters_track);
    return os.str();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

KeyValues read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t eq = line.find('=', start);
        if (eq == std::string::npos)
            throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv.emplace_back(trim(line.substr(start, eq - start)), trim(line.substr(eq + 1)));
    }
    return kv;
}

RunConfig parse_config(const KeyValues& file_values, const KeyValues& flag_values) {
    RunConfig cfg;
    for (const auto& [k, v] : file_values) apply_key(cfg, k, v);
    for (const auto& [k, v] : flag_values) apply_key(cfg, k, v);
    validate_config(cfg);
    return cfg;
}

void validate_config(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json")
        fail("format", "expected csv or json, got '" + cfg.format + "'");
    const bool rate = cfg.experiment == "rate";

    const int n_t = rate ? cfg.rate.n_t : cfg.mse.n_t;
    const int n_r = rate ? cfg.rate.n_r : cfg.mse.n_r;
    const int l = rate ? cfg.rate.l : cfg.mse.l;
    const double delta = rate ? cfg.rate.delta_deg : cfg.mse.delta_deg;
    const double rho = rate ? cfg.rate.rho : cfg.mse.rho;
    const auto& m_list = rate ? cfg.rate.m_list : cfg.mse.m_list;
    const auto scheme = rate ? cfg.rate.scheme : cfg.mse.scheme;
    const int g_t = rate ? cfg.rate.g_t : cfg.mse.g_t;
    const int g_r = rate ? cfg.rate.g_r : cfg.mse.g_r;
    const int g_bar_t = rate ? cfg.rate.g_bar_t : cfg.mse.g_bar_t;
    const int g_bar_r = rate ? cfg.rate.g_bar_r : cfg.mse.g_bar_r;
    const auto& solver = rate ? cfg.rate.solver : cfg.mse.solver;
    const int blocks = rate ? cfg.rate.blocks : cfg.mse.blocks;
    const int reals = rate ? cfg.rate.realizations : cfg.mse.realizations;

    if (n_t < 1) fail("n_t", "must be >= 1");
    if (n_r < 1) fail("n_r", "must be >= 1");
    if (l < 1) fail("l", "must be >= 1");
    if (!(delta > 0.0)) fail("delta_deg", "must be > 0");
    if (!(rho >= -1.0 && rho <= 1.0))
        fail("rho", "must lie in [-1, 1], got " + format_double(rho));
    if (m_list.empty()) fail("m", "needs at least one entry");
    for (int m : m_list) {
        if (m < 1) fail("m", "entries must be >= 1");
        if (scheme == TrainingScheme::DftSubset && (m > n_t || m > n_r))
            fail("m", "dft-subset needs m <= min(n_t, n_r)");
    }
    if (g_t < 2) fail("g_t", "must be >= 2");
    if (g_r < 2) fail("g_r", "must be >= 2");
    if (g_bar_t < 2) fail("g_bar_t", "must be >= 2");
    if (g_bar_r < 2) fail("g_bar_r", "must be >= 2");
    if (solver.cosamp_iters < 1) fail("cosamp_iters", "must be >= 1");
    if (solver.iht_iters < 1) fail("iht_iters", "must be >= 1");
    if (!(solver.step_size > 0.0)) fail("step_size", "must be > 0");
    if (solver.residual_tol < 0.0) fail("residual_tol", "must be >= 0");
    if (blocks < 1) fail("blocks", "must be >= 1");
    if (reals < 1) fail("realizations", "must be >= 1");
    if (rate && cfg.rate.snr_db_list.empty()) fail("snr_db", "needs at least one entry");
    if (!rate && cfg.mse.scenarios.empty()) fail("scenarios", "needs at least one entry");
}

KeyValues config_echo(const RunConfig& cfg) {
    const bool rate = cfg.experiment == "rate";
    KeyValues kv;
    auto put = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    put("experiment", cfg.experiment);
    put("format", cfg.format);
    put("out", cfg.out);
    if (!cfg.plot_out.empty()) put("plot_out", cfg.plot_out);
    if (rate) {
        const auto& c = cfg.rate;
        put("n_t", std::to_string(c.n_t));
        put("n_r", std::to_string(c.n_r));
        put("l", std::to_string(c.l));
        put("delta_deg", format_double(c.delta_deg));
        put("delta_est_deg", format_double(c.delta_est_deg));
        put("rho", format_double(c.rho));
        put("pathloss", format_double(c.pathloss));
        put("m", join_ints(c.m_list));
        put("scheme", scheme_name(c.scheme));
        put("g_t", std::to_string(c.g_t));
        put("g_r", std::to_string(c.g_r));
        put("g_bar_t", std::to_string(c.g_bar_t));
        put("g_bar_r", std::to_string(c.g_bar_r));
        put("cosamp_iters", std::to_string(c.solver.cosamp_iters));
        put("iht_iters", std::to_string(c.solver.iht_iters));
        put("step_size", format_double(c.solver.step_size));
        put("residual_tol", format_double(c.solver.residual_tol));
        put("normalize_columns", c.solver.normalize_columns ? "true" : "false");
        put("safeguard_step", c.solver.safeguard_step ? "true" : "false");
        put("adaptive_step", c.solver.adaptive_step ? "true" : "false");
        put("snr_db", join_reals(c.snr_db_list));
        put("training_snr_db", format_double(c.training_snr_db));
        put("constant_modulus", c.constant_modulus ? "true" : "false");
        put("include_full_greedy", c.include_full_greedy ? "true" : "false");
        put("blocks", std::to_string(c.blocks));
        put("realizations", std::to_string(c.realizations));
        put("seed", std::to_string(c.seed));
    } else {
        const auto& c = cfg.mse;
        put("n_t", std::to_string(c.n_t));
        put("n_r", std::to_string(c.n_r));
        put("l", std::to_string(c.l));
        put("delta_deg", format_double(c.delta_deg));
        put("delta_est_deg", format_double(c.delta_est_deg));
        put("rho", format_double(c.rho));
        put("pathloss", format_double(c.pathloss));
        put("m", join_ints(c.m_list));
        put("scheme", scheme_name(c.scheme));
        put("g_t", std::to_string(c.g_t));
        put("g_r", std::to_string(c.g_r));
        put("g_bar_t", std::to_string(c.g_bar_t));
        put("g_bar_r", std::to_string(c.g_bar_r));
        put("cosamp_iters", std::to_string(c.solver.cosamp_iters));
        put("iht_iters", std::to_string(c.solver.iht_iters));
        put("step_size", format_double(c.solver.step_size));
        put("residual_tol", format_double(c.solver.residual_tol));
        put("normalize_columns", c.solver.normalize_columns ? "true" : "false");
        put("safeguard_step", c.solver.safeguard_step ? "true" : "false");
        put("adaptive_step", c.solver.adaptive_step ? "true" : "false");
        bool custom = false;
        for (const auto& s : c.scenarios) custom = custom || s.label == "custom";
        if (custom) {
            std::vector<double> snrs;
            for (const auto& s : c.scenarios) snrs.push_back(s.snr_db);
            put("snr_db", join_reals(snrs));
        } else {
            std::string labels;
            for (std::size_t i = 0; i < c.scenarios.size(); ++i)
                labels += (i ? "," : "") + c.scenarios[i].label;
            put("scenarios", labels);
        }
        put("blocks", std::to_string(c.blocks));
        put("realizations", std::to_string(c.realizations));
        put("seed", std::to_string(c.seed));
    }
    return kv;
}

void write_results_csv(std::ostream& os, const RunConfig& cfg,
                       const std::vector<ExperimentRecord>& records,
                       const std::vector<ComplexityRow>& complexity, const std::string& status) {
    os << "# artifact_version=" << kArtifactVersion << '\n';
    os << "# status=" << status << '\n';
    for (const auto& [k, v] : config_echo(cfg)) os << "# " << k << '=' << v << '\n';
    if (cfg.experiment == "complexity") {
        os << "estimator,m,g_t,g_r,g_bar_t,g_bar_r,measured,predicted,ratio\n";
        for (const auto& row : complexity)
            os << row.estimator << ',' << row.m << ',' << row.g_t << ',' << row.g_r << ','
               << row.g_bar_t << ',' << row.g_bar_r << ',' << format_double(row.measured) << ','
               << format_double(row.predicted) << ',' << format_double(row.ratio) << '\n';
        return;
    }
    os << "estimator,m,n_t,n_r,l,g_t,g_r,g_bar_t,g_bar_r,scenario,snr_db,blocks,realizations,"
          "mean_mse,mean_mse_db,mean_rate,op_count_init,op_count_tracking,mean_iters_init,"
          "mean_iters_track\n";
    for (const auto& rec : records) os << csv_row(rec) << '\n';
}

void write_results_json(std::ostream& os, const RunConfig& cfg,
                        const std::vector<ExperimentRecord>& records,
                        const std::vector<ComplexityRow>& complexity, const std::string& status) {
    nlohmann::ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["status"] = status;
    nlohmann::ordered_json jc;
    for (const auto& [k, v] : config_echo(cfg)) jc[k] = v;
    j["config"] = std::move(jc);
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json jr;
        jr["estimator"] = r.estimator;
        jr["m"] = r.m;
        jr["n_t"] = r.n_t;
        jr["n_r"] = r.n_r;
        jr["l"] = r.l;
        jr["scenario"] = r.scenario;
        jr["snr_db"] = r.snr_db;
        jr["blocks"] = r.blocks;
        jr["realizations"] = r.realizations;
        jr["mean_mse"] = r.mean_mse;
        jr["mean_mse_db"] = r.mean_mse_db;
        jr["mean_rate"] = r.mean_rate;
        jr["op_count_init"] = r.op_count_init;
        jr["op_count_tracking"] = r.op_count_tracking;
        jr["mean_iters_init"] = r.mean_iters_init;
        jr["mean_iters_track"] = r.mean_iters_track;
        jr["per_block_mse"] = r.per_block_mse;
        jr["per_realization"] = r.per_realization;
        j["records"].push_back(std::move(jr));
    }
    if (cfg.experiment == "complexity") {
        j["complexity"] = nlohmann::ordered_json::array();
        for (const auto& row : complexity) {
            nlohmann::ordered_json jr;
            jr["estimator"] = row.estimator;
            jr["m"] = row.m;
            jr["measured"] = row.measured;
            jr["predicted"] = row.predicted;
            jr["ratio"] = row.ratio;
            j["complexity"].push_back(std::move(jr));
        }
    }
    os << j.dump(2) << '\n';
}

void emit_plotdata(std::ostream& os, const RunConfig& cfg,
                   const std::vector<ExperimentRecord>& records) {
    if (cfg.experiment == "rate") {
        os << "snr_db,estimator,m,n,rate\n";
        for (const auto& r : records)
            os << format_double(r.snr_db) << ',' << r.estimator << ',' << r.m << ',' << r.n_t
               << ',' << format_double(r.mean_rate) << '\n';
    } else {
        os << "m,estimator,scenario,mse_db\n";
        for (const auto& r : records)
            os << r.m << ',' << r.estimator << ',' << r.scenario << ','
               << format_double(r.mean_mse_db) << '\n';
    }
}

void print_summary(std::ostream& os, const RunConfig& cfg,
                   const std::vector<ExperimentRecord>& records,
                   const std::vector<ComplexityRow>& complexity) {
    os << std::left;
    if (cfg.experiment == "complexity") {
        os << std::setw(14) << "estimator" << std::setw(6) << "M" << std::setw(16) << "measured"
           << std::setw(16) << "predicted" << "ratio\n";
        for (const auto& row : complexity)
            os << std::setw(14) << row.estimator << std::setw(6) << row.m << std::setw(16)
               << row.measured << std::setw(16) << row.predicted << std::setprecision(3)
               << row.ratio << std::setprecision(6) << '\n';
        return;
    }
    const bool rate = cfg.experiment == "rate";
    os << std::setw(14) << "estimator" << std::setw(6) << "M" << std::setw(10)
       << (rate ? "snr_db" : "scenario") << (rate ? "rate_bps_hz" : "mse_db") << '\n';
    for (const auto& r : records) {
        os << std::setw(14) << r.estimator << std::setw(6) << r.m;
        if (rate)
            os << std::setw(10) << r.snr_db << std::setprecision(4) << r.mean_rate;
        else
            os << std::setw(10) << r.scenario << std::setprecision(4) << r.mean_mse_db;
        os << std::setprecision(6) << '\n';
    }
}

int run_experiment(const RunConfig& cfg, std::ostream& summary_out,
                   const std::atomic<bool>* cancel) {
    std::vector<ExperimentRecord> records;
    std::vector<ComplexityRow> complexity;
    int requested = 0;
    if (cfg.experiment == "rate") {
        RateExperimentConfig c = cfg.rate;
        c.cancel = cancel;
        requested = c.realizations;
        records = run_rate_experiment(c);
    } else {
        MseExperimentConfig c = cfg.mse;
        c.cancel = cancel;
        requested = c.realizations;
        records = run_mse_experiment(c);
        if (cfg.experiment == "complexity") complexity = complexity_report(records);
    }
    const std::string status =
        (!records.empty() && records.front().realizations == requested) ? "complete" : "partial";

    std::ofstream out(cfg.out);
    if (!out) {
        summary_out << "error: cannot write '" << cfg.out << "'\n";
        return 1;
    }
    if (cfg.format == "json")
        write_results_json(out, cfg, records, complexity, status);
    else
        write_results_csv(out, cfg, records, complexity, status);
    out.close();

    if (!cfg.plot_out.empty() && cfg.experiment != "complexity") {
        std::ofstream pout(cfg.plot_out);
        if (!pout) {
            summary_out << "error: cannot write '" << cfg.plot_out << "'\n";
            return 1;
        }
        emit_plotdata(pout, cfg, records);
    }

    print_summary(summary_out, cfg, records, complexity);
    summary_out << "status: " << status << "  ->  " << cfg.out << '\n';
    return status == "complete" ? 0 : 2;
}

}  // namespace mmcs
