#pragma once

#include "regen/availmodel.hpp"
#include "regen/churnsim.hpp"
#include "regen/flowgraph.hpp"
#include "regen/params.hpp"
#include "regen/rational.hpp"
#include "regen/rlnc.hpp"
#include "regen/tradeoff.hpp"
#include "regen/traceio.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

// Command-line surface: five subcommands emitting CSV/JSON plot data.
// Identical flags and inputs produce byte-identical output; files are
// written atomically (temp + rename); errors go to the error stream with a
// nonzero exit code.

namespace regen::cli {

namespace detail {

inline int write_output(const std::string& path, const std::string& content, std::ostream& out,
                        std::ostream& err) {
    if (path.empty() || path == "-") {
        out << content;
        return 0;
    }
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            err << "error: cannot open " << tmp.string() << " for writing\n";
            return 2;
        }
        f << content;
        if (!f.good()) {
            err << "error: write to " << tmp.string() << " failed\n";
            return 2;
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        err << "error: rename to " << path << " failed: " << ec.message() << '\n';
        return 2;
    }
    return 0;
}

inline nlohmann::ordered_json params_json(const SystemParams& p) {
    return {{"n", p.n},
            {"k", p.k},
            {"d", p.d},
            {"file_size", rat_to_fraction(p.file_size)},
            {"alpha", rat_to_fraction(p.alpha)},
            {"beta", rat_to_fraction(p.beta)},
            {"gamma", rat_to_fraction(p.gamma())}};
}

struct TradeoffRow {
    std::string label;
    Rat gamma;
    Rat alpha;
};

inline std::string emit_tradeoff(const SystemParams& p, const std::vector<TradeoffRow>& rows,
                                 const std::string& format) {
    std::ostringstream os;
    if (format == "csv") {
        os << "label,gamma,gamma_decimal,alpha,alpha_decimal\n";
        for (const auto& r : rows)
            os << r.label << ',' << rat_to_fraction(r.gamma) << ',' << rat_to_decimal(r.gamma)
               << ',' << rat_to_fraction(r.alpha) << ',' << rat_to_decimal(r.alpha) << '\n';
        return os.str();
    }
    nlohmann::ordered_json j;
    j["params"] = params_json(p);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"label", r.label},
                             {"gamma", rat_to_fraction(r.gamma)},
                             {"gamma_decimal", rat_to_decimal(r.gamma)},
                             {"alpha", rat_to_fraction(r.alpha)},
                             {"alpha_decimal", rat_to_decimal(r.alpha)}});
    return j.dump(2) + "\n";
}

struct CollectorReport {
    std::vector<int> nodes;
    flowgraph::CutResult cut;
    bool feasible = false;
};

inline std::string emit_mincut(const SystemParams& p, const std::string& mode, const Rat& bound,
                               const std::vector<CollectorReport>& reports,
                               const std::string& format) {
    if (format == "csv") {
        std::ostringstream os;
        os << "collector,cut,cut_decimal,feasible\n";
        for (const auto& r : reports) {
            os << '"';
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                os << (i ? " " : "") << r.nodes[i];
            os << "\",";
            if (r.cut.infinite)
                os << "inf,inf,";
            else
                os << rat_to_fraction(r.cut.value) << ',' << rat_to_decimal(r.cut.value) << ',';
            os << (r.feasible ? 1 : 0) << '\n';
        }
        return os.str();
    }
    nlohmann::ordered_json j;
    j["params"] = params_json(p);
    j["mode"] = mode;
    j["bound"] = rat_to_fraction(bound);
    j["bound_decimal"] = rat_to_decimal(bound);
    bool all_ok = true;
    j["collectors"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json jc;
        jc["nodes"] = r.nodes;
        if (r.cut.infinite) {
            jc["cut"] = "inf";
        } else {
            jc["cut"] = rat_to_fraction(r.cut.value);
            jc["cut_decimal"] = rat_to_decimal(r.cut.value);
        }
        jc["feasible"] = r.feasible;
        bool meets = r.cut.infinite || r.cut.value >= bound;
        jc["meets_bound"] = meets;
        if (!r.feasible) all_ok = false;
        if (!r.cut.infinite && !r.feasible) {
            jc["cut_edges"] = nlohmann::ordered_json::array();
            for (const auto& e : r.cut.cut_edges)
                jc["cut_edges"].push_back(
                    {{"src", e.src}, {"dst", e.dst}, {"capacity", rat_to_fraction(e.capacity)}});
        }
        j["collectors"].push_back(std::move(jc));
    }
    j["all_feasible"] = all_ok;
    return j.dump(2) + "\n";
}

inline std::string emit_model(const std::vector<availmodel::StrategyPoint>& pts,
                              const std::vector<bool>& selected, bool mark_selected,
                              const std::string& format) {
    if (format == "csv") {
        std::ostringstream os;
        os << "strategy,n,k,R,unavailability,bandwidth_bytes_per_day,storage_bytes";
        if (mark_selected) os << ",selected";
        os << '\n';
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            os << availmodel::strategy_name(p.strategy) << ',' << p.n << ',' << p.k << ','
               << rat_to_fraction(p.redundancy) << ',' << availmodel::format_sci(p.unavailability)
               << ',' << availmodel::format_sci(p.bandwidth_per_day) << ','
               << availmodel::format_sci(p.storage);
            if (mark_selected) os << ',' << (selected[i] ? 1 : 0);
            os << '\n';
        }
        return os.str();
    }
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        nlohmann::ordered_json jp = {{"strategy", availmodel::strategy_name(p.strategy)},
                                     {"n", p.n},
                                     {"k", p.k},
                                     {"R", rat_to_fraction(p.redundancy)},
                                     {"unavailability", p.unavailability},
                                     {"bandwidth_bytes_per_day", p.bandwidth_per_day},
                                     {"storage_bytes", p.storage}};
        if (mark_selected) jp["selected"] = static_cast<bool>(selected[i]);
        j.push_back(std::move(jp));
    }
    return j.dump(2) + "\n";
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"regenerating-codes laboratory: tradeoff curves, flow-graph cuts, coded "
                 "repair simulation, availability models, trace estimation"};
    app.require_subcommand(1);

    std::string output_path = "-";
    std::string format = "";
    app.add_option("--output", output_path, "output file, or - for standard output")
        ->capture_default_str();
    app.add_option("--format", format, "output format: csv or json (subcommand default)");

    // ---- tradeoff ----------------------------------------------------
    auto* t = app.add_subcommand("tradeoff", "storage/repair-bandwidth tradeoff curve");
    int t_n = 0, t_k = 0, t_d = 0, t_points = 25;
    std::string t_file = "1";
    std::vector<std::string> t_eval;
    t->add_option("--n", t_n, "total nodes")->required();
    t->add_option("--k", t_k, "reconstruction degree")->required();
    t->add_option("--d", t_d, "repair degree")->required();
    t->add_option("--file-size", t_file, "file size M (rational)")->capture_default_str();
    t->add_option("--points", t_points, "curve sample count")->capture_default_str();
    t->add_option("--eval-gamma", t_eval, "extra gamma values to evaluate (rational, repeatable)");

    // ---- mincut ------------------------------------------------------
    auto* mc = app.add_subcommand("mincut", "information flow graph min-cuts vs the cut bound");
    int mc_n = 0, mc_k = 0, mc_d = 0, mc_samples = 20;
    std::string mc_alpha, mc_beta, mc_file = "1", mc_history;
    bool mc_worst = false, mc_relaxed = false;
    std::uint64_t mc_seed = 1;
    mc->add_option("--n", mc_n, "total nodes")->required();
    mc->add_option("--k", mc_k, "reconstruction degree")->required();
    mc->add_option("--d", mc_d, "repair degree")->required();
    mc->add_option("--alpha", mc_alpha, "per-node storage (rational)")->required();
    mc->add_option("--beta", mc_beta, "per-helper transfer (rational)")->required();
    mc->add_option("--file-size", mc_file, "file size M (rational)")->capture_default_str();
    auto* mc_wc = mc->add_flag("--worst-case", mc_worst, "use the bound-achieving layered graph");
    auto* mc_hf = mc->add_option("--history-file", mc_history,
                                 "failure/repair history: 'fail <id>' / 'join <id> <h1,...,hd>'");
    mc_wc->excludes(mc_hf);
    mc->add_option("--samples", mc_samples, "collectors sampled on a history graph")
        ->capture_default_str();
    mc->add_flag("--relaxed-helpers", mc_relaxed, "allow helpers/collectors on inactive nodes");
    mc->add_option("--seed", mc_seed, "collector sampling seed")->capture_default_str();

    // ---- simulate ----------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "coded churn simulation (JSON report)");
    int s_n = 0, s_k = 0, s_d = 0, s_rounds = 10, s_csamples = 100, s_mincut = 0, s_bits = 8;
    long long s_cap = 4096;
    std::size_t s_plen = 4;
    std::string s_alpha, s_beta, s_file = "1", s_fail = "uniform-random", s_help = "random-d";
    std::uint64_t s_seed = 1;
    bool s_payload = false;
    sim->add_option("--n", s_n, "total nodes")->required();
    sim->add_option("--k", s_k, "reconstruction degree")->required();
    sim->add_option("--d", s_d, "repair degree")->required();
    sim->add_option("--alpha", s_alpha, "per-node storage (rational)")->required();
    sim->add_option("--beta", s_beta, "per-helper transfer (rational)")->required();
    sim->add_option("--file-size", s_file, "file size M (rational)")->capture_default_str();
    sim->add_option("--rounds", s_rounds, "failure/repair rounds")->capture_default_str();
    sim->add_option("--seed", s_seed, "simulation seed")->capture_default_str();
    sim->add_option("--failure-policy", s_fail, "uniform-random | round-robin | oldest-first")
        ->capture_default_str();
    sim->add_option("--helper-policy", s_help, "random-d | most-recent-d")->capture_default_str();
    sim->add_option("--collector-samples", s_csamples, "decode probes per round")
        ->capture_default_str();
    sim->add_option("--mincut-samples", s_mincut, "flow-graph cross-checks per round")
        ->capture_default_str();
    sim->add_option("--field-bits", s_bits, "coefficient field: 8 or 16")->capture_default_str();
    sim->add_flag("--with-payload", s_payload, "carry and verify payload bytes");
    sim->add_option("--payload-len", s_plen, "payload words per packet")->capture_default_str();
    sim->add_option("--unit-cap", s_cap, "max packets per quantity")->capture_default_str();

    // ---- model -------------------------------------------------------
    auto* mo = app.add_subcommand("model", "availability/bandwidth frontier (CSV)");
    std::string mo_trace, mo_strategies = "replication,ideal,hybrid,msr,mbr";
    double mo_f = -1, mo_a = -1, mo_file = 1e6, mo_target = 1e-4;
    int mo_k = 0, mo_nmax = 60;
    auto* mo_tn = mo->add_option("--trace-name", mo_trace,
                                 "built-in churn model: planetlab, microsoft, skype, gnutella");
    auto* mo_fo = mo->add_option("--f", mo_f, "permanent failures per node-day");
    auto* mo_ao = mo->add_option("--a", mo_a, "node availability");
    mo_tn->excludes(mo_fo)->excludes(mo_ao);
    mo_fo->needs(mo_ao);
    mo_ao->needs(mo_fo);
    mo->add_option("--k", mo_k, "reconstruction degree")->required();
    mo->add_option("--file-size", mo_file, "file size in bytes")->capture_default_str();
    mo->add_option("--strategies", mo_strategies, "comma-separated strategy list")
        ->capture_default_str();
    auto* mo_to = mo->add_option("--target-unavail", mo_target,
                                 "mark each strategy's point nearest this unavailability");
    mo->add_option("--n-max", mo_nmax, "largest node count swept")->capture_default_str();

    // ---- trace -------------------------------------------------------
    auto* tr = app.add_subcommand("trace", "estimate churn parameters from a trace (JSON)");
    std::string tr_input;
    double tr_timeout = 24.0;
    bool tr_clean = false;
    tr->add_option("--input", tr_input, "trace CSV path, or - for standard input")->required();
    tr->add_option("--timeout-hours", tr_timeout, "downtime above this is a permanent failure")
        ->capture_default_str();
    tr->add_flag("--clean-planetlab", tr_clean, "drop system-wide measurement-glitch downtimes");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (t->parsed()) {
            if (format.empty()) format = "csv";
            auto p = SystemParams::make(t_n, t_k, t_d, parse_rational(t_file));
            if (t_points < 1) throw std::invalid_argument("--points must be >= 1");
            Rat lo = tradeoff::gamma_min(p);
            Rat hi = Rat(3, 2) * tradeoff::f_break(p, 0);
            std::vector<detail::TradeoffRow> rows;
            for (int j = 0; j < t_points; ++j) {
                Rat g = t_points == 1 ? lo : lo + (hi - lo) * Rat(j) / Rat(t_points - 1);
                auto a = tradeoff::threshold_alpha(p, g);
                if (!a) throw std::logic_error("threshold infeasible inside [gamma_min, hi]");
                rows.push_back({"curve", g, *a});
            }
            auto msr = tradeoff::msr_point(p);
            auto mbr = tradeoff::mbr_point(p);
            rows.push_back({"msr", msr.gamma, msr.alpha});
            rows.push_back({"mbr", mbr.gamma, mbr.alpha});
            for (const auto& s : t_eval) {
                Rat g = parse_rational(s);
                auto a = tradeoff::threshold_alpha(p, g);
                if (!a)
                    throw std::invalid_argument("gamma " + s + " is below gamma_min = " +
                                                rat_to_fraction(lo));
                rows.push_back({"eval", g, *a});
            }
            return detail::write_output(output_path, detail::emit_tradeoff(p, rows, format), out,
                                        err);
        }

        if (mc->parsed()) {
            if (format.empty()) format = "json";
            auto p = SystemParams::make(mc_n, mc_k, mc_d, parse_rational(mc_file),
                                        parse_rational(mc_alpha), parse_rational(mc_beta));
            if (!mc_worst && mc_history.empty())
                throw std::invalid_argument("pass --worst-case or --history-file");
            Rat bound = flowgraph::lemma2_bound(p);
            std::vector<detail::CollectorReport> reports;
            std::string mode;
            if (mc_worst) {
                mode = "worst-case";
                auto wc = flowgraph::build_worst_case(p);
                auto v = flowgraph::check_reconstruction_feasible(wc.graph, wc.collector);
                reports.push_back({wc.collector, v.cut, v.feasible});
            } else {
                mode = "history";
                std::ifstream hf(mc_history);
                if (!hf) throw std::invalid_argument("cannot open history file " + mc_history);
                auto history = flowgraph::RepairHistory::parse(hf);
                auto g = flowgraph::InfoFlowGraph::build(
                    p, history,
                    mc_relaxed ? flowgraph::HelperMode::AnyExisting
                               : flowgraph::HelperMode::ActiveOnly);
                auto ids = mc_relaxed ? g.all_nodes() : g.active_nodes();
                std::sort(ids.begin(), ids.end());
                std::vector<std::vector<int>> collectors;
                if (churnsim::detail::binomial(static_cast<int>(ids.size()), p.k) <= mc_samples) {
                    collectors = churnsim::detail::all_subsets(ids, p.k);
                } else {
                    auto rng = rlnc::RngStream::stream_for(mc_seed, 0, 0);
                    for (int i = 0; i < mc_samples; ++i)
                        collectors.push_back(churnsim::detail::sample_subset(ids, p.k, rng));
                }
                for (const auto& c : collectors) {
                    auto v = flowgraph::check_reconstruction_feasible(g, c);
                    reports.push_back({c, v.cut, v.feasible});
                }
            }
            return detail::write_output(output_path,
                                        detail::emit_mincut(p, mode, bound, reports, format), out,
                                        err);
        }

        if (sim->parsed()) {
            churnsim::SimConfig cfg;
            cfg.params = SystemParams::make(s_n, s_k, s_d, parse_rational(s_file),
                                            parse_rational(s_alpha), parse_rational(s_beta));
            cfg.rounds = s_rounds;
            cfg.seed = s_seed;
            cfg.collector_samples = s_csamples;
            cfg.mincut_samples = s_mincut;
            cfg.field_bits = s_bits;
            cfg.with_payload = s_payload;
            cfg.payload_len = s_plen;
            cfg.unit_cap = s_cap;
            if (s_fail == "uniform-random")
                cfg.failure_policy = churnsim::FailurePolicy::UniformRandom;
            else if (s_fail == "round-robin")
                cfg.failure_policy = churnsim::FailurePolicy::RoundRobin;
            else if (s_fail == "oldest-first")
                cfg.failure_policy = churnsim::FailurePolicy::OldestFirst;
            else
                throw std::invalid_argument("unknown failure policy '" + s_fail + "'");
            if (s_help == "random-d")
                cfg.helper_policy = churnsim::HelperPolicy::AllActiveRandomD;
            else if (s_help == "most-recent-d")
                cfg.helper_policy = churnsim::HelperPolicy::MostRecentD;
            else
                throw std::invalid_argument("unknown helper policy '" + s_help + "'");
            auto report = churnsim::run(cfg);
            return detail::write_output(output_path, report.to_json().dump(2) + "\n", out, err);
        }

        if (mo->parsed()) {
            if (format.empty()) format = "csv";
            availmodel::ChurnModel model;
            if (!mo_trace.empty()) {
                model = availmodel::builtin_model(mo_trace);
            } else if (mo_f >= 0 && mo_a >= 0) {
                model = {"custom", mo_f, mo_a, 0, 0, 0};
            } else {
                throw std::invalid_argument("pass --trace-name or both --f and --a");
            }
            std::vector<availmodel::Strategy> strategies;
            std::istringstream ss(mo_strategies);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) strategies.push_back(availmodel::strategy_from_name(tok));
            if (strategies.empty()) throw std::invalid_argument("no strategies given");
            std::vector<availmodel::StrategyPoint> pts;
            std::vector<bool> selected;
            for (auto s : strategies) {
                auto sw = availmodel::sweep(s, mo_file, mo_k, model, mo_target, mo_nmax);
                for (std::size_t i = 0; i < sw.points.size(); ++i) {
                    pts.push_back(sw.points[i]);
                    selected.push_back(static_cast<int>(i) == sw.nearest);
                }
            }
            bool mark = mo_to->count() > 0;
            return detail::write_output(output_path,
                                        detail::emit_model(pts, selected, mark, format), out, err);
        }

        if (tr->parsed()) {
            traceio::AvailabilityTrace trace;
            if (tr_input == "-") {
                trace = traceio::parse_trace(std::cin);
            } else {
                std::ifstream f(tr_input);
                if (!f) throw std::invalid_argument("cannot open trace file " + tr_input);
                trace = traceio::parse_trace(f);
            }
            if (tr_clean) trace = traceio::clean_planetlab(trace);
            if (tr_timeout <= 0) throw std::invalid_argument("--timeout-hours must be positive");
            if (trace.span_end <= trace.span_start)
                err << "warning: empty trace, reporting zeros\n";
            auto summary =
                traceio::estimate(trace, static_cast<long long>(tr_timeout * 3600.0 + 0.5));
            return detail::write_output(output_path, summary.to_json().dump(2) + "\n", out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    err << "error: no subcommand\n";
    return 2;
}

}  // namespace regen::cli
