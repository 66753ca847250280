#include "toc/harness.hpp"

#include <iostream>
#include <map>

#include "toc/error.hpp"
#include "toc/mock_backend.hpp"
#include "toc/remote_backend.hpp"
#include "toc/text.hpp"

namespace toc {

std::vector<AblationVariant> standard_variants() {
    return {{"full", true, true, true},
            {"no-gating", false, true, true},
            {"no-widening", true, false, true},
            {"single-agent", true, true, false}};
}

AblationVariant variant_by_name(const std::string& name) {
    for (const auto& v : standard_variants())
        if (v.name == name) return v;
    throw Error(ErrorCode::ConfigError, "unknown ablation variant '" + name + "'");
}

std::unique_ptr<AgentBackend> make_backend(const RunConfig& cfg, bool constant_disclosed) {
    if (cfg.backend.kind == BackendKind::Remote && !constant_disclosed)
        return std::make_unique<RemoteBackend>(cfg.backend);
    MockOptions opts;
    opts.noise = cfg.mock_noise;
    opts.seed = cfg.search.seed;
    opts.max_plan_ops = cfg.mock_max_plan_ops;
    opts.constant_disclosed = constant_disclosed;
    return std::make_unique<MockBackend>(opts);
}

namespace {

AgentBackendConfig agent_config(const RunConfig& cfg) {
    auto b = cfg.backend;
    b.seed = cfg.search.seed;
    return b;
}

MetricReport metrics_for(const CorpusRecord& record, const SearchResult& r, const RewardComponents& best,
                         const std::vector<ReasoningChain>& original_chains,
                         const std::vector<ReasoningChain>& best_chains, double completeness) {
    MetricReport m;
    if (record.gold_labels) {
        std::vector<DisclosureStatus> predicted;
        std::vector<bool> gold;
        for (const auto& label : *record.gold_labels)
            for (const auto& c : original_chains)
                if (c.element_id == label.element.element_id) {
                    predicted.push_back(c.status);
                    gold.push_back(label.disclosed);
                }
        m.coverage_f1 = coverage_f1(predicted, gold);
    }
    // The untouched claim covers nothing, so the change is the best state's coverage.
    m.delta_coverage = delta_coverage(0.0, best.coverage);
    m.scope_retention = 1.0 - best.scope_penalty;
    m.novelty = best.novelty;
    m.consistency = best.consistency;
    m.uncertainty = best.uncertainty_penalty;
    m.rouge_l = rouge_l(r.best_claim.raw_text, r.original_claim.raw_text);
    m.bleu = bleu(r.best_claim.raw_text, r.original_claim.raw_text);
    m.json_completeness = completeness;
    m.chain_entropy = chain_entropy(best_chains);
    return m;
}

}  // namespace

RecordRun run_record(const CorpusRecord& record, const RunConfig& cfg, const AblationVariant& variant,
                     const RunHooks& hooks) {
    validate(cfg);
    auto backend = make_backend(cfg, !variant.multi_agent);
    AgentStats stats;
    const auto acfg = agent_config(cfg);
    ExaminerAgent examiner(*backend, acfg, &stats);
    EditorAgent editor(*backend, acfg, &stats);
    EditEnvironment env(examiner, editor, record.prior_art, cfg.search.precedence, cfg.search.novelty_ops,
                        cfg.search.weights);

    auto scfg = cfg.search;
    scfg.gating_enabled = scfg.gating_enabled && variant.gating_enabled;
    scfg.widening_enabled = scfg.widening_enabled && variant.widening_enabled;
    SearchEngine engine(scfg, env);
    if (hooks.audit) engine.set_audit_sink(hooks.audit);
    if (hooks.queue) engine.set_intervention_queue(hooks.queue);
    if (hooks.snapshot) engine.set_snapshot_callback(hooks.snapshot);
    if (hooks.on_iteration) engine.set_iteration_callback(hooks.on_iteration);
    engine.set_step_delay(hooks.step_delay);

    RecordRun run;
    run.result = engine.run(record.claim);

    if (variant.multi_agent) {
        run.metrics = metrics_for(record, run.result, run.result.best_components, run.result.original_chains,
                                  run.result.best_chains, stats.json_completeness());
    } else {
        auto eval_backend = make_backend(cfg, false);
        ExaminerAgent eval_examiner(*eval_backend, acfg, &stats);
        EditorAgent eval_editor(*eval_backend, acfg, &stats);
        EditEnvironment eval_env(eval_examiner, eval_editor, record.prior_art, cfg.search.precedence,
                                 cfg.search.novelty_ops, cfg.search.weights);
        eval_env.set_original(record.claim);
        const auto ev = eval_env.evaluate(run.result.best_claim, run.result.best_path);
        run.metrics = metrics_for(record, run.result, ev.components, eval_env.original_chains(), ev.chains,
                                  stats.json_completeness());
    }
    run.agent_failures = stats.failures.load();
    return run;
}

std::vector<AblationRow> run_ablation(const std::vector<CorpusRecord>& corpus,
                                      const std::vector<AblationVariant>& variants, const RunConfig& cfg) {
    std::vector<AblationRow> rows;
    for (const auto& v : variants) {
        for (const auto& rec : corpus) {
            AblationRow row;
            row.variant = v.name;
            row.record_id = rec.claim.claim_id;
            row.seed = cfg.search.seed;
            try {
                auto run = run_record(rec, cfg, v);
                row.metrics = run.metrics;
                row.best_reward = run.result.best_reward;
                row.result = std::move(run.result);
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
                std::cerr << "ablation " << v.name << " / " << rec.claim.claim_id << " failed: " << e.what() << "\n";
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out =
        "variant,record_id,seed,coverage_f1,delta_coverage,scope_retention,novelty,consistency,uncertainty,"
        "best_reward\n";
    for (const auto& r : rows) {
        out += r.variant + "," + r.record_id + "," + std::to_string(r.seed);
        if (r.failed) {
            out += ",,,,,,,\n";
            continue;
        }
        const auto& m = r.metrics;
        for (double v : {m.coverage_f1, m.delta_coverage, m.scope_retention, m.novelty, m.consistency, m.uncertainty,
                         r.best_reward})
            out += "," + text::format_double(v);
        out += "\n";
    }
    return out;
}

std::vector<SensitivityRow> run_sensitivity(const std::vector<CorpusRecord>& corpus, const SensitivityGrid& grid,
                                            const RunConfig& cfg) {
    if (grid.sigma_max.empty() || grid.alpha.empty() || grid.t_max.empty())
        throw Error(ErrorCode::InvalidInput, "sensitivity grid axes must be non-empty");
    std::vector<SensitivityRow> rows;
    for (const auto& rec : corpus)
        for (double s : grid.sigma_max)
            for (double a : grid.alpha)
                for (int t : grid.t_max) {
                    SensitivityRow row;
                    row.sigma_max = s;
                    row.alpha = a;
                    row.t_max = t;
                    row.record_id = rec.claim.claim_id;
                    auto cell = cfg;
                    cell.search.sigma_max_epi = s;
                    cell.search.alpha = a;
                    cell.search.t_max = t;
                    try {
                        const auto run = run_record(rec, cell);
                        row.best_reward = run.result.best_reward;
                        row.coverage = run.result.best_components.coverage;
                    } catch (const std::exception& e) {
                        row.failed = true;
                        row.error = e.what();
                        std::cerr << "sweep cell " << rec.claim.claim_id << " failed: " << e.what() << "\n";
                    }
                    rows.push_back(std::move(row));
                }
    return rows;
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
    std::string out = "sigma_max,alpha,t_max,record_id,best_reward,coverage\n";
    for (const auto& r : rows) {
        out += text::format_double(r.sigma_max) + "," + text::format_double(r.alpha) + "," + std::to_string(r.t_max) +
               "," + r.record_id;
        if (r.failed)
            out += ",,\n";
        else
            out += "," + text::format_double(r.best_reward) + "," + text::format_double(r.coverage) + "\n";
    }
    return out;
}

std::string reward_curve(const std::vector<std::pair<long, double>>& trace) {
    std::string out = "iteration,best_so_far\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i > 0 && trace[i].second < trace[i - 1].second)
            throw Error(ErrorCode::InternalInvariant,
                        "best_so_far decreases at iteration " + std::to_string(trace[i].first));
        out += std::to_string(trace[i].first) + "," + text::format_double(trace[i].second) + "\n";
    }
    return out;
}

}  // namespace toc
