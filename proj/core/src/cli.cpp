#include "counterfair/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>

#include "counterfair/corpus.hpp"
#include "counterfair/errors.hpp"
#include "counterfair/gateway.hpp"
#include "counterfair/io.hpp"
#include "counterfair/metrics.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/refusal.hpp"
#include "counterfair/report.hpp"
#include "counterfair/stats.hpp"

#ifndef COUNTERFAIR_DATA_DIR
#define COUNTERFAIR_DATA_DIR "data"
#endif

namespace counterfair {

namespace {

namespace fs = std::filesystem;

ScorerPaths default_scorer_paths() {
    const fs::path base = COUNTERFAIR_DATA_DIR;
    ScorerPaths p;
    p.hedge = base / "lexicons" / "hedge.lex";
    p.politeness = base / "lexicons" / "politeness.lex";
    p.negative = base / "lexicons" / "negative.lex";
    p.valence = base / "lexicons" / "valence.lex";
    p.patterns = base / "patterns" / "refusal.patterns";
    return p;
}

struct CliOptions {
    std::string plan_path;
    std::string out_dir = "out";
    std::string mode = "synthetic";
    std::string corpus_path;       // collect: replay source; score: input corpus
    std::string metrics_path;      // analyze/report input
    std::string comparisons_path;  // report input
    std::string refusals_path;     // report input
    std::optional<std::uint64_t> seed;
    int concurrency = 4;
    std::size_t top_k = 5;
    std::string hedge_path, polite_path, neg_path, valence_path, patterns_path;
};

ScorerPaths scorer_paths(const CliOptions& opt) {
    ScorerPaths p = default_scorer_paths();
    if (!opt.hedge_path.empty()) p.hedge = opt.hedge_path;
    if (!opt.polite_path.empty()) p.politeness = opt.polite_path;
    if (!opt.neg_path.empty()) p.negative = opt.neg_path;
    if (!opt.valence_path.empty()) p.valence = opt.valence_path;
    if (!opt.patterns_path.empty()) p.patterns = opt.patterns_path;
    return p;
}

CollectMode parse_mode(const std::string& mode) {
    if (mode == "live") return CollectMode::Live;
    if (mode == "replay") return CollectMode::Replay;
    if (mode == "synthetic") return CollectMode::Synthetic;
    throw config_error("unknown mode '" + mode + "' (expected live, replay, or synthetic)");
}

AuditPlan load_validated_plan(const std::string& path) {
    if (path.empty()) throw config_error("--plan is required");
    AuditPlan plan = load_plan(path);
    const auto problems = validate_plan(plan);
    if (!problems.empty()) {
        std::string msg = "plan '" + path + "' is invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw config_error(msg);
    }
    return plan;
}

fs::path out_file(const CliOptions& opt, const char* name) {
    return fs::path(opt.out_dir) / name;
}

void stage_validate(const CliOptions& opt) {
    const AuditPlan plan = load_validated_plan(opt.plan_path);
    const auto grid = expand_identity_grid(plan.axes);
    std::cout << "plan ok: " << plan.name << " (" << grid.size() << " identities, "
              << plan.prompts.size() << " prompts, " << plan.models.size() << " models, "
              << "fingerprint " << plan_fingerprint(plan) << ")\n";
}

void stage_collect(const CliOptions& opt) {
    AuditPlan plan = load_validated_plan(opt.plan_path);
    RunOptions run;
    run.mode = parse_mode(opt.mode);
    run.replay_corpus = opt.corpus_path;
    run.seed_override = opt.seed;
    run.gateway.concurrency = opt.concurrency;
    if (run.mode == CollectMode::Replay && opt.corpus_path.empty())
        throw config_error("--corpus is required in replay mode");
    RunResult result = run_audit(plan, run);
    for (const auto& w : result.warnings) std::cerr << "warning: [collect] " << w << "\n";
    const fs::path path = out_file(opt, "corpus.jsonl");
    save_corpus(result.corpus, path);
    std::cout << "collect: " << result.corpus.records.size() << " records -> " << path.string()
              << "\n";
}

void stage_score(const CliOptions& opt) {
    const fs::path corpus_path =
        opt.corpus_path.empty() ? out_file(opt, "corpus.jsonl") : fs::path(opt.corpus_path);
    const Corpus corpus = load_corpus(corpus_path);
    const TextScorer scorer = load_scorer(scorer_paths(opt));
    const ScoringResult result = score_corpus(corpus, scorer);
    for (const auto& f : result.flagged) std::cerr << "warning: [score] " << f << "\n";
    const fs::path metrics_path = out_file(opt, "metrics.csv");
    atomic_write_file(metrics_path, metrics_to_csv(result.rows));
    const auto refusal_rows = refusal_rate_table(corpus, scorer.patterns);
    const fs::path refusals_path = out_file(opt, "refusals.csv");
    atomic_write_file(refusals_path, refusal_table_to_csv(refusal_rows));
    std::cout << "score: " << result.rows.size() << " rows -> " << metrics_path.string() << ", "
              << refusal_rows.size() << " cells -> " << refusals_path.string();
    if (result.excluded_records)
        std::cout << " (" << result.excluded_records << " excluded records skipped)";
    std::cout << "\n";
}

void stage_analyze(const CliOptions& opt) {
    AuditPlan plan = load_validated_plan(opt.plan_path);
    if (opt.seed) plan.rng_seed = *opt.seed;
    const fs::path metrics_path =
        opt.metrics_path.empty() ? out_file(opt, "metrics.csv") : fs::path(opt.metrics_path);
    const auto rows = load_metrics(metrics_path);
    const auto comparisons = pairwise_sweep(rows, plan);
    const fs::path out = out_file(opt, "comparisons.csv");
    atomic_write_file(out, comparisons_to_csv(comparisons));
    std::size_t significant = 0;
    for (const auto& c : comparisons) significant += c.significant ? 1 : 0;
    std::cout << "analyze: " << comparisons.size() << " comparisons (" << significant
              << " significant) -> " << out.string() << "\n";
}

void stage_report(const CliOptions& opt) {
    const AuditPlan plan = load_validated_plan(opt.plan_path);
    const fs::path metrics_path =
        opt.metrics_path.empty() ? out_file(opt, "metrics.csv") : fs::path(opt.metrics_path);
    const fs::path comparisons_path = opt.comparisons_path.empty()
                                          ? out_file(opt, "comparisons.csv")
                                          : fs::path(opt.comparisons_path);
    const fs::path refusals_path =
        opt.refusals_path.empty() ? out_file(opt, "refusals.csv") : fs::path(opt.refusals_path);
    const auto rows = load_metrics(metrics_path);
    const auto comparisons = load_comparisons(comparisons_path);
    const auto refusals = load_refusal_table(refusals_path);

    const auto grid = expand_identity_grid(plan.axes);
    std::vector<std::string> identity_order;
    for (const auto& profile : grid) identity_order.push_back(profile.label);
    std::vector<std::string> model_order;
    for (const auto& m : plan.models) model_order.push_back(m.name);

    for (const auto& metric : metric_names()) {
        const auto series = boxplot_data(rows, metric, model_order, identity_order);
        const fs::path path = fs::path(opt.out_dir) / ("boxplot_" + metric + ".csv");
        atomic_write_file(path, boxplot_to_csv(series));
    }
    const fs::path report_path = out_file(opt, "report.md");
    atomic_write_file(report_path, render_report(plan, refusals, rows, comparisons, opt.top_k));
    std::cout << "report: " << report_path.string() << " plus boxplot CSVs in " << opt.out_dir
              << "\n";
}

void stage_run(const CliOptions& opt) {
    stage_collect(opt);
    CliOptions chained = opt;
    chained.corpus_path.clear();  // later stages read from out_dir
    stage_score(chained);
    stage_analyze(chained);
    stage_report(chained);
}

void add_data_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--hedge-lexicon", opt.hedge_path, "Hedge lexicon file");
    cmd->add_option("--polite-lexicon", opt.polite_path, "Politeness lexicon file");
    cmd->add_option("--neg-lexicon", opt.neg_path, "Negative-tone lexicon file");
    cmd->add_option("--valence-lexicon", opt.valence_path, "Sentiment valence lexicon file");
    cmd->add_option("--refusal-patterns", opt.patterns_path, "Refusal pattern table file");
}

void add_out_dir_flag(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--out-dir", opt.out_dir, "Artifact directory")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CliOptions opt;
    CLI::App app{"Counterfactual fairness audit for advisory language models"};
    app.name("audit");
    app.require_subcommand(1);

    CLI::App* plan_cmd = app.add_subcommand("plan", "Plan file utilities");
    plan_cmd->require_subcommand(1);
    CLI::App* validate_cmd = plan_cmd->add_subcommand("validate", "Check a plan file");
    validate_cmd->add_option("--plan", opt.plan_path, "Audit plan file")->required();

    CLI::App* collect_cmd = app.add_subcommand("collect", "Gather one response per plan cell");
    collect_cmd->add_option("--plan", opt.plan_path, "Audit plan file")->required();
    collect_cmd->add_option("--mode", opt.mode, "live, replay, or synthetic")->required();
    collect_cmd->add_option("--corpus", opt.corpus_path, "Source corpus for replay mode");
    collect_cmd->add_option("--seed", opt.seed, "Override the plan RNG seed");
    collect_cmd->add_option("--concurrency", opt.concurrency, "Parallel live requests")
        ->capture_default_str();
    add_out_dir_flag(collect_cmd, opt);

    CLI::App* score_cmd = app.add_subcommand("score", "Classify refusals and compute metrics");
    score_cmd->add_option("--corpus", opt.corpus_path, "Corpus file (default <out-dir>/corpus.jsonl)");
    add_out_dir_flag(score_cmd, opt);
    add_data_flags(score_cmd, opt);

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Run the paired statistical sweep");
    analyze_cmd->add_option("--plan", opt.plan_path, "Audit plan file")->required();
    analyze_cmd->add_option("--metrics", opt.metrics_path,
                            "Metrics table (default <out-dir>/metrics.csv)");
    analyze_cmd->add_option("--seed", opt.seed, "Override the plan RNG seed");
    add_out_dir_flag(analyze_cmd, opt);

    CLI::App* report_cmd = app.add_subcommand("report", "Render report.md and boxplot CSVs");
    report_cmd->add_option("--plan", opt.plan_path, "Audit plan file")->required();
    report_cmd->add_option("--metrics", opt.metrics_path,
                           "Metrics table (default <out-dir>/metrics.csv)");
    report_cmd->add_option("--comparisons", opt.comparisons_path,
                           "Comparisons table (default <out-dir>/comparisons.csv)");
    report_cmd->add_option("--refusals", opt.refusals_path,
                           "Refusal table (default <out-dir>/refusals.csv)");
    report_cmd->add_option("--top-k", opt.top_k, "Rows per model in top-pair tables")
        ->capture_default_str();
    add_out_dir_flag(report_cmd, opt);

    CLI::App* run_cmd = app.add_subcommand("run", "collect, score, analyze, and report");
    run_cmd->add_option("--plan", opt.plan_path, "Audit plan file")->required();
    run_cmd->add_option("--mode", opt.mode, "live, replay, or synthetic")->capture_default_str();
    run_cmd->add_option("--corpus", opt.corpus_path, "Source corpus for replay mode");
    run_cmd->add_option("--seed", opt.seed, "Override the plan RNG seed");
    run_cmd->add_option("--concurrency", opt.concurrency, "Parallel live requests")
        ->capture_default_str();
    run_cmd->add_option("--top-k", opt.top_k, "Rows per model in top-pair tables")
        ->capture_default_str();
    add_out_dir_flag(run_cmd, opt);
    add_data_flags(run_cmd, opt);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: [usage] " << e.what() << "\n";
        std::cerr << "run 'audit --help' for usage\n";
        return 2;
    }

    const char* stage = "audit";
    try {
        if (validate_cmd->parsed()) {
            stage = "plan";
            stage_validate(opt);
        } else if (collect_cmd->parsed()) {
            stage = "collect";
            stage_collect(opt);
        } else if (score_cmd->parsed()) {
            stage = "score";
            stage_score(opt);
        } else if (analyze_cmd->parsed()) {
            stage = "analyze";
            stage_analyze(opt);
        } else if (report_cmd->parsed()) {
            stage = "report";
            stage_report(opt);
        } else if (run_cmd->parsed()) {
            stage = "run";
            stage_run(opt);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: [" << stage << "] " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace counterfair
