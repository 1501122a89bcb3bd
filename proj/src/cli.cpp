#include "hclab/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hclab/agnostic.hpp"
#include "hclab/downstream.hpp"
#include "hclab/errors.hpp"
#include "hclab/generators.hpp"
#include "hclab/instance.hpp"
#include "hclab/markov.hpp"

namespace hclab {

namespace {

using nlohmann::json;

json rational_json(const Rational& r) { return r.str(); }

Representation parse_rep(const std::string& spec, const Instance& inst) {
    Representation g;
    if (spec.empty()) {
        for (int j = 0; j < inst.dim(); ++j) g.coords.push_back(j);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) g.coords.push_back(std::stoi(tok));
    }
    if (g.coords.size() != static_cast<std::size_t>(inst.dim()))
        throw ConfigError("--rep must list exactly d classifier indices");
    for (int j : g.coords)
        if (j < 0 || j >= static_cast<int>(inst.family().size()))
            throw ConfigError("--rep index out of range: " + std::to_string(j));
    return g;
}

Task parse_task(const std::string& spec, const Instance& inst) {
    Task t;
    if (spec.empty()) {
        for (int c = 0; c < inst.num_clusters(); ++c)
            t.labels.push_back(static_cast<std::int8_t>(c < inst.num_clusters() / 2 ? +1 : -1));
        return t;
    }
    if (spec.size() != static_cast<std::size_t>(inst.num_clusters()))
        throw ConfigError("--task must have one +/- per cluster");
    for (char ch : spec) {
        if (ch != '+' && ch != '-') throw ConfigError("--task characters must be + or -");
        t.labels.push_back(static_cast<std::int8_t>(ch == '+' ? +1 : -1));
    }
    return t;
}

json config_echo(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    if (!cfg.instance_path.empty()) j["instance"] = cfg.instance_path;
    j["beta"] = cfg.beta;
    j["ell"] = cfg.ell;
    j["rho"] = cfg.rho;
    j["seed"] = cfg.seed;
    j["budget"] = cfg.budget;
    j["cap"] = cfg.cap;
    // threads deliberately not echoed: it never changes results, and leaving
    // it out keeps reports byte-identical across worker counts
    if (!cfg.rep.empty()) j["rep"] = cfg.rep;
    if (!cfg.task.empty()) j["task"] = cfg.task;
    return j;
}

void flatten_csv(const json& node, const std::string& prefix, std::ostream& os) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it)
            flatten_csv(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i)
            flatten_csv(node[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << "," << node.dump() << "\n";
    }
}

void emit(const RunConfig& cfg, const json& report) {
    std::ostringstream body;
    if (cfg.format == "csv") {
        body << "key,value\n";
        flatten_csv(report, "", body);
    } else {
        body << report.dump(2) << "\n";
    }
    if (cfg.out.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw ConfigError("cannot write report to " + cfg.out);
        f << body.str();
    }
}

json certificate_json(const GapCertificate& cert) {
    json j;
    j["coord"] = cert.coord;
    j["cluster"] = cert.cluster;
    j["sigma"] = cert.sigma;
    j["epsilon"] = rational_json(cert.epsilon);
    j["delta"] = rational_json(cert.delta);
    j["R_norm"] = rational_json(cert.R_norm);
    j["positive_gap"] = cert.positive_gap;
    j["negative_gap"] = cert.negative_gap;
    j["verdict"] = cert.improved ? "improved" : "not-improved";
    j["beta"] = cert.beta;
    j["rho"] = cert.rho;
    j["ell"] = cert.ell;
    json rows = json::array();
    for (const NearUniformRow& r : cert.near_uniform) {
        json row;
        row["c"] = r.c;
        row["active"] = r.active;
        row["negligible"] = r.negligible;
        row["intermediate"] = r.intermediate;
        rows.push_back(row);
    }
    j["near_uniform"] = rows;
    return j;
}

int dispatch(const RunConfig& cfg, json& results) {
    LossParams p{cfg.beta, cfg.ell, cfg.rho};
    int exit_code = kExitOk;

    if (cfg.command == "eval") {
        Instance inst = load_instance_file(cfg.instance_path);
        results["instance_digest"] = instance_digest(inst);
        Representation g = parse_rep(cfg.rep, inst);
        if (cfg.mode == "mc") {
            LossBreakdown b = infonce_mc(g, inst, p, cfg.seed, cfg.samples, cfg.threads);
            results["alignment"] = b.alignment;
            results["uniformity"] = b.uniformity;
            results["total"] = b.total;
            results["std_error"] = b.std_error;
            results["mode"] = b.mode;
            results["samples"] = b.n_samples;
        } else {
            LossBreakdown b = cfg.rho == 1.0 ? infonce_exact(g, inst, p, cfg.cap)
                                             : weighted_infonce(g, inst, p, cfg.cap);
            results["alignment"] = b.alignment;
            results["uniformity"] = b.uniformity;
            results["total"] = b.total;
            results["mode"] = b.mode;
            results["hat_loss"] = hat_loss(g, inst, p, cfg.cap);
            results["clean"] = is_clean(g, inst);
            results["cluster_preserving"] = is_cluster_preserving(g, inst);
        }
    } else if (cfg.command == "blur-trace") {
        HypercubeDist D = cfg.start == "uniform"
                              ? HypercubeDist::uniform(cfg.d)
                              : HypercubeDist::point_mass(Vertex{0, cfg.d});
        BlurTrace trace = blur_monotonicity_check(D, p, cfg.steps, cfg.cap);
        results["values"] = trace.values;
        results["first_non_decrease"] = trace.first_non_decrease;
        results["indeterminate_steps"] = trace.indeterminate_steps;
        results["strictly_decreasing"] = trace.strictly_decreasing;
        std::vector<double> tv;
        for (int t = 0; t <= cfg.steps; ++t) tv.push_back(mixing_distance(D, t));
        results["tv_from_uniform"] = tv;
    } else if (cfg.command == "kernel-audit") {
        HammingKernel formula = hamming_kernel(cfg.d);
        HammingKernel brute = hamming_kernel_bruteforce(cfg.d);
        bool match = formula == brute;
        results["match"] = match;
        json rows = json::array();
        for (int h = 0; h <= cfg.d; ++h) {
            json row = json::array();
            for (int k = 0; k <= cfg.d; ++k) row.push_back(formula.entry(h, k).str());
            rows.push_back(row);
        }
        results["rows"] = rows;
        if (!match) exit_code = kExitFinding;
    } else if (cfg.command == "lemma-sweep") {
        json beta0, residual, lo_sums, hi_sums;
        for (int d = cfg.dmin; d <= cfg.dmax; ++d) {
            double b0 = -1.0;
            try {
                b0 = calibrate_beta0({d}).at(d);
            } catch (const ConfigError&) {
                // no beta makes the binomial-weighted sum strictly negative:
                // the sum telescopes to zero for every beta and C
            }
            if (b0 > 0)
                beta0[std::to_string(d)] = b0;
            else
                beta0[std::to_string(d)] = nullptr;
            HammingDist U = induced_hamming(HypercubeDist::uniform(d));
            double worst = 0.0, lo = 0.0, hi = 0.0;
            for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
                LossParams pd{beta, cfg.ell, 1.0};
                for (double C : lemma17_C_grid()) {
                    double acc = 0.0;
                    for (int k = 0; k <= d; ++k)
                        acc += U.mass(static_cast<std::size_t>(k)).to_double() *
                               delta_C(k, C, pd, d);
                    worst = std::max(worst, std::abs(acc));
                    double s = lemma17_sum(C, pd, d);
                    lo = std::min(lo, s);
                    hi = std::max(hi, s);
                }
            }
            residual[std::to_string(d)] = worst;
            lo_sums[std::to_string(d)] = lo;
            hi_sums[std::to_string(d)] = hi;
        }
        results["version"] = 1;
        results["beta0"] = beta0;
        results["max_stationarity_residual"] = residual;
        results["min_binomial_weighted_sum"] = lo_sums;
        results["max_binomial_weighted_sum"] = hi_sums;
    } else if (cfg.command == "verify-minimizer") {
        Instance inst = load_instance_file(cfg.instance_path);
        results["instance_digest"] = instance_digest(inst);
        Representation g = cfg.rep.empty() ? reference_uniform_rep(inst) : parse_rep(cfg.rep, inst);
        MinimizerReport rep = verify_minimizer(g, inst, p, cfg.budget, cfg.seed, cfg.cap);
        results["mode"] = rep.mode;
        results["evaluated"] = rep.evaluated;
        results["skipped"] = rep.skipped;
        results["ties"] = rep.ties;
        results["counterexamples"] = rep.counterexamples;
        results["pass"] = rep.pass;
        results["argmin_matches"] = rep.argmin_matches;
        results["loss_star"] = rep.loss_star;
        results["seed"] = rep.seed;
        results["blur_checked"] = rep.blur_checked;
        if (rep.blur_checked) results["blur_strictly_decreasing"] = rep.blur.strictly_decreasing;
        if (!rep.pass) exit_code = kExitFinding;
    } else if (cfg.command == "agnostic-cert") {
        Instance inst = load_instance_file(cfg.instance_path);
        results["instance_digest"] = instance_digest(inst);
        Representation g = parse_rep(cfg.rep, inst);
        CertifyConfig cc;
        cc.c_const = cfg.const_c;
        cc.term_cap = cfg.cap;
        GapCertificate cert = cfg.weighted ? certify_weighted(g, inst, p, cc)
                                           : certify_not_minimizer(g, inst, p, cc);
        results["certificate"] = certificate_json(cert);
    } else if (cfg.command == "head-synth") {
        Instance inst = load_instance_file(cfg.instance_path);
        results["instance_digest"] = instance_digest(inst);
        Representation g = cfg.rep.empty() ? reference_uniform_rep(inst) : parse_rep(cfg.rep, inst);
        Task task = parse_task(cfg.task, inst);
        ReluHead head = synth_head(g, task, inst);
        results["rows"] = head.W.size();
        results["bias"] = head.bias();
        results["error"] = rational_json(downstream_error(g, head, task, inst));
    } else if (cfg.command == "adversarial") {
        AdversarialOutput adv = adversarial_instance(cfg.d, cfg.k);
        results["instance_digest"] = instance_digest(adv.inst);
        results["images"] = adv.inst.num_images();
        results["clusters"] = adv.inst.num_clusters();
        results["clean"] = is_clean(adv.g, adv.inst);
        results["cluster_preserving"] = is_cluster_preserving(adv.g, adv.inst);
        if (cfg.d <= 3)
            results["best_head_error"] =
                rational_json(downstream_error_best(adv.g, adv.task, adv.inst));
        if (!cfg.out.empty()) {
            // --out names the instance file here; the report goes to stdout
            save_instance_file(adv.inst, cfg.out);
            results["written"] = cfg.out;
        }
    } else if (cfg.command == "gen-instance") {
        Instance inst = [&] {
            if (cfg.kind == "realizable-balanced")
                return make_realizable_balanced(cfg.d, cfg.clusters, cfg.naturals, cfg.augs,
                                                cfg.nonclean, cfg.seed);
            if (cfg.kind == "agnostic-toy") return make_agnostic_toy(cfg.d, cfg.seed).inst;
            if (cfg.kind == "adversarial") return adversarial_instance(cfg.d, cfg.k).inst;
            throw ConfigError("unknown instance kind: " + cfg.kind);
        }();
        if (cfg.out.empty()) throw ConfigError("gen-instance requires --out");
        save_instance_file(inst, cfg.out);
        results["written"] = cfg.out;
        results["instance_digest"] = instance_digest(inst);
        results["images"] = inst.num_images();
        results["clusters"] = inst.num_clusters();
        results["family_size"] = inst.family().size();
        results["intertwined_pass"] = check_assumption_intertwined(inst).pass();
        results["expressivity_pass"] = check_assumption_expressivity(inst).pass();
        DeltaRegularity dr = delta_regularity(inst);
        results["delta"] = dr.finite ? json(rational_json(dr.value)) : json("inf");
    } else {
        throw ConfigError("unknown command: " + cfg.command);
    }
    return exit_code;
}

}  // namespace

int run(const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    json report;
    report["tool_version"] = kToolVersion;
    report["config"] = config_echo(cfg);
    int code = kExitOk;
    try {
        json results;
        code = dispatch(cfg, results);
        report["results"] = results;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InstanceError& e) {
        std::cerr << "instance error: " << e.what() << "\n";
        return kExitInstance;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const std::logic_error& e) {
        std::cerr << "finding: " << e.what() << "\n";
        return kExitFinding;
    }
    // gen-instance and adversarial use --out for the generated instance file;
    // their reports always go to stdout.
    if (cfg.command == "gen-instance" || cfg.command == "adversarial") {
        RunConfig stdout_cfg = cfg;
        stdout_cfg.out.clear();
        emit(stdout_cfg, report);
    } else {
        emit(cfg, report);
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cerr << cfg.command << ": " << ms << " ms\n";
    return code;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"hypercube contrastive-loss verification laboratory"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--beta", cfg.beta, "inverse temperature");
        sub->add_option("--ell", cfg.ell, "negative sample count");
        sub->add_option("--rho", cfg.rho, "alignment weight");
        sub->add_option("--seed", cfg.seed, "deterministic seed");
        sub->add_option("--budget", cfg.budget, "search budget (loss evaluations)");
        sub->add_option("--cap", cfg.cap, "exact-engine term cap");
        sub->add_option("--format", cfg.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--threads", cfg.threads, "worker count (never changes results)");
    };
    auto add_instance = [&](CLI::App* sub) {
        sub->add_option("--instance", cfg.instance_path, "instance file")->required();
    };

    CLI::App* eval = app.add_subcommand("eval", "evaluate the loss on an instance");
    add_common(eval);
    add_instance(eval);
    eval->add_option("--rep", cfg.rep, "comma-separated classifier indices");
    eval->add_option("--mode", cfg.mode, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    eval->add_option("--samples", cfg.samples, "Monte-Carlo sample count");

    CLI::App* blur = app.add_subcommand("blur-trace", "distance-loss trace under bit-flip blur");
    add_common(blur);
    blur->add_option("--d", cfg.d, "dimension");
    blur->add_option("--steps", cfg.steps, "blur steps");
    blur->add_option("--start", cfg.start, "point|uniform")
        ->check(CLI::IsMember({"point", "uniform"}));

    CLI::App* kern = app.add_subcommand("kernel-audit", "closed forms vs brute-force kernel");
    add_common(kern);
    kern->add_option("--d", cfg.d, "dimension");

    CLI::App* lemma = app.add_subcommand("lemma-sweep", "calibrate the descent threshold");
    add_common(lemma);
    lemma->add_option("--dmin", cfg.dmin, "smallest dimension");
    lemma->add_option("--dmax", cfg.dmax, "largest dimension");

    CLI::App* verify = app.add_subcommand("verify-minimizer", "search for better representations");
    add_common(verify);
    add_instance(verify);
    verify->add_option("--rep", cfg.rep, "reference representation (default: canonical)");

    CLI::App* cert = app.add_subcommand("agnostic-cert", "cluster-preserving perturbation gap");
    add_common(cert);
    add_instance(cert);
    cert->add_option("--rep", cfg.rep, "representation to certify");
    cert->add_flag("--weighted", cfg.weighted, "use the rho-weighted loss");
    cert->add_option("--const-c", cfg.const_c, "extra near-uniformity constant");

    CLI::App* head = app.add_subcommand("head-synth", "build the constructive ReLU head");
    add_common(head);
    add_instance(head);
    head->add_option("--rep", cfg.rep, "representation (default: canonical)");
    head->add_option("--task", cfg.task, "+/- per cluster (default: balanced)");

    CLI::App* adv = app.add_subcommand("adversarial", "balanced negative construction");
    add_common(adv);
    adv->add_option("--d", cfg.d, "dimension");
    adv->add_option("--k", cfg.k, "images per (cluster, vertex) cell");

    CLI::App* gen = app.add_subcommand("gen-instance", "write a generated instance");
    add_common(gen);
    gen->add_option("--kind", cfg.kind, "realizable-balanced|agnostic-toy|adversarial")->required();
    gen->add_option("--d", cfg.d, "dimension");
    gen->add_option("--clusters", cfg.clusters, "cluster count");
    gen->add_option("--naturals", cfg.naturals, "naturals per cluster");
    gen->add_option("--augs", cfg.augs, "augmentations per natural");
    gen->add_option("--nonclean", cfg.nonclean, "non-clean classifiers to add");
    gen->add_option("--k", cfg.k, "adversarial cell size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return run(cfg);
}

}  // namespace hclab
