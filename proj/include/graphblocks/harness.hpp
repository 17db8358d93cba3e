#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphblocks/catalog.hpp"
#include "graphblocks/diagnostics.hpp"
#include "graphblocks/runtime.hpp"
#include "graphblocks/stats.hpp"

namespace graphblocks {

// ---------------------------------------------------------------------------
// Benchmark vocabulary
// ---------------------------------------------------------------------------

enum class Ablation { proposed, no_types, extra_description, alternative };
enum class Verdict { correct, incorrect_logic, error };
enum class BenchMode { live, replay };

const char* ablation_name(Ablation a);
std::optional<Ablation> ablation_from_name(const std::string& name);
const char* verdict_name(Verdict v);
std::optional<Verdict> verdict_from_name(const std::string& name);

struct PromptCase {
    int id = 0;                 // 1-based
    std::string text;           // user query, verbatim
    // Necessary-condition predicate over the finished run; deliberately
    // permissive (docs/benchmark.md documents each approximation).
    std::function<bool(const RunResult&)> check;
};

const std::vector<PromptCase>& benchmark_prompts();
const PromptCase& prompt_by_id(int id);

// Deterministic event replay used when judging a prompt (flag click at t=0
// plus the prompt's key events).
EventSchedule default_schedule(int prompt_id);

// ---------------------------------------------------------------------------
// Prompt construction
// ---------------------------------------------------------------------------

// Reference node document given to the model.  The alternative ablation
// reuses the fully-typed reference; it differs only in the output format
// the system prompt requests.
std::string build_reference(const Catalog& catalog, Ablation ablation);

std::string build_system_prompt(Ablation ablation, const std::string& reference_nodes);

// ---------------------------------------------------------------------------
// Chat-completions client
// ---------------------------------------------------------------------------

struct EndpointConfig {
    std::string base_url = "https://api.groq.com/openai/v1";
    std::string model = "openai/gpt-oss-120b";
    double temperature = 1.0;
    double top_p = 1.0;
    int max_completion_tokens = 8192;
    std::string reasoning_effort = "medium";  // empty = omit from request
    std::string api_key;                      // from GRAPHBLOCKS_API_KEY
    int max_attempts = 3;
    int timeout_seconds = 120;
    int backoff_base_ms = 500;                // doubles per retry
};

// Reads GRAPHBLOCKS_API_KEY (and optional GRAPHBLOCKS_BASE_URL /
// GRAPHBLOCKS_MODEL) into a default config.
EndpointConfig endpoint_from_env();

// Single chat completion; retries transient failures with exponential
// backoff.  Throws AuthError / RateLimited / TransportError / EmptyResponse.
std::string query_model(const EndpointConfig& cfg, const std::string& system_prompt,
                        const std::string& user_prompt);

// Strips explicit reasoning segments (<think>...</think>) so extraction
// sees only the final message.
std::string strip_reasoning(const std::string& content);

// Stable content address of a prompt pair (FNV-1a 64, hex).
std::string request_hash(const std::string& system_prompt, const std::string& user_prompt);

// ---------------------------------------------------------------------------
// Fixture store: one JSON-lines file per (ablation, run)
// ---------------------------------------------------------------------------

struct FixtureRecord {
    int prompt_id = 0;
    std::string request_hash;
    std::string raw_output;
};

class FixtureStore {
  public:
    explicit FixtureStore(std::string dir) : dir_(std::move(dir)) {}

    std::string path_for(Ablation ablation, int run_index) const;
    // prompt id -> record; missing file yields an empty map.
    std::map<int, FixtureRecord> load(Ablation ablation, int run_index) const;
    void append(Ablation ablation, int run_index, const FixtureRecord& rec) const;

  private:
    std::string dir_;
};

// ---------------------------------------------------------------------------
// Attempts, verdicts, reports
// ---------------------------------------------------------------------------

struct RunRecord {
    Ablation ablation = Ablation::proposed;
    int run_index = 1;
    int prompt_id = 0;
    Verdict verdict = Verdict::error;
    std::string detail;                // stage reached / checker outcome
    std::optional<Diagnostic> failure; // error verdicts
};

// Full judgment chain on an already-available raw model output:
// extract -> parse (per ablation format) -> convert -> validate -> compile
// -> run(default schedule) -> checker.  Never throws; failures become
// error verdicts.
RunRecord judge_output(Ablation ablation, int run_index, int prompt_id,
                       const std::string& raw_output, const Catalog& catalog,
                       const RunConfig& run_config);

// Manual annotation override: (ablation, run, prompt) -> verdict, loaded
// from a CSV with header ablation,run,prompt_id,verdict.
using AnnotationMap = std::map<std::tuple<std::string, int, int>, Verdict>;
AnnotationMap parse_annotations(const std::string& csv_text);
void apply_annotations(std::vector<RunRecord>& records, const AnnotationMap& notes);

struct BenchOptions {
    std::vector<Ablation> ablations{Ablation::proposed};
    int runs = 5;
    BenchMode mode = BenchMode::replay;
    std::string fixtures_dir;
    EndpointConfig endpoint;
    RunConfig run_config;
    int parallel = 1;
    AnnotationMap annotations;
};

// Runs the benchmark protocol; in live mode every model reply is appended
// to the fixture store before judging.  Records come back sorted by
// (ablation, run, prompt) regardless of parallelism.
std::vector<RunRecord> run_bench(const BenchOptions& options, const Catalog& catalog);

struct AblationSummary {
    Ablation ablation = Ablation::proposed;
    int prompts = 20;
    std::vector<int> per_run_correct;     // indexed by run
    std::vector<double> per_run_accuracy;
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;
};

std::vector<AblationSummary> summarize(const std::vector<RunRecord>& records);

struct Comparison {
    Ablation a;
    Ablation b;
    TTestResult test;
};

Comparison compare_ablations(const std::vector<AblationSummary>& summaries,
                             Ablation a, Ablation b);

// records.csv round-trip (schema: ablation,run,prompt_id,verdict,detail).
std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& csv_text);

// Human-readable accuracy table plus any requested comparisons.
std::string render_report(const std::vector<AblationSummary>& summaries,
                          const std::vector<Comparison>& comparisons);
std::string summary_to_csv(const std::vector<AblationSummary>& summaries);

}  // namespace graphblocks
