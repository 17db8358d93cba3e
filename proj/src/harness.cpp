#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "graphblocks/graph.hpp"
#include "graphblocks/harness.hpp"

namespace graphblocks {

namespace {

// ---------------------------------------------------------------------------
// System prompt templates ({reference_nodes} is substituted)
// ---------------------------------------------------------------------------

constexpr const char* kPromptHead = R"(## Goal

You are an expert software engineer extremely proficient in programming using a graph-based, visual programming language. You will be provided with the following information:

**User Query**: The overall functionality that you are required to fulfill through calling pre-declared functions.

Your task is to analyze the **User Query** and generate a connected graph that fulfills the requested functionality in **User Query**. All necessary nodes and connections MUST be included in your output. Each node can be instantiated in the graph more than once.

## Node Reference (Complete Form)

Every possible node in their complete form:

{reference_nodes}

## Output Format
)";

constexpr const char* kPromptTailPrimary = R"(
Your output must be a JSON object in the following format:
{"nodes": Dict[str, Node], "edges": List[Edge]}

The keys of the 'nodes' dictionary are NODEIDs, which are unique string identifiers such that no two nodes can have the same NODEID. A NODEID must contain only letters (a-z, A-Z) and be prefixed with "node_".

The Node type is
{"name": NODENAME, "value": any|None}
The value field of a Node type is always None except for when it is for a constant, in which case its NODENAME is "Constant" and its value is the value it is supposed to hold (e.g. 10, "Hello", True).

The Edge type is
{"outNodeID": str, "outPortID": str, "inNodeID": str, "inPortID": str}
outNodeID is the NODEID of the node of which you are using one of the outPorts. inNodeID is the NODEID of the node of which you are using one of the inPorts. Connecting constants to a node should be done like the following example: "moving 10 steps" means having the edge {"outNodeID": IDOfAConstantNode, "outPortID": "", "inNodeID": "IDOfAMoveStepsNode", "inPortID": "STEPS"}. A "field" of a node can be considered an inPort for the purposes of an Edge. An outPort connects to an inPort; an outPort cannot connect to another outPort, and an inPort cannot connect to another inPort.
)";

constexpr const char* kPromptTailAlternative = R"(
Your output must be a JSON object in the following format:
{[key: NODEID]: {"nodeName": NODENAME, "value": any|None, "edges": List[Edge]}}

NODEIDs are unique string identifiers such that no two nodes can have the same NODEID. A NODEID must contain only letters (a-z, A-Z) and be prefixed with "node_". The value field of a Node type is always None except for when it is for a constant, in which case its NODENAME is "Constant" and its value is the value it is supposed to hold (e.g. 10, "Hello", True).

The Edge type is
{"portID": str, "otherNodeID": OTHERNODEID}

OTHERNODEID is the NODEID this current node is connected to via the port with ID that matches the one specified in portID. An outPort connects to an inPort; an outPort cannot connect to another outPort, and an inPort cannot connect to another inPort. A Constant node has only one port, and it is an outPort: VALUE. A "field" of a node can be considered an inPort for the purposes of an Edge. Port connections must be defined in the "edges" list for both the to and from nodes.
)";

std::string replace_once(std::string text, const std::string& marker, const std::string& value) {
    auto pos = text.find(marker);
    if (pos != std::string::npos) text.replace(pos, marker.size(), value);
    return text;
}

// ---------------------------------------------------------------------------
// Minimal CSV field codec (quotes only when needed)
// ---------------------------------------------------------------------------

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(DiagCode::SchemaViolation, what + " must be an integer, got '" + s + "'");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

const char* ablation_name(Ablation a) {
    switch (a) {
        case Ablation::proposed: return "proposed";
        case Ablation::no_types: return "no_types";
        case Ablation::extra_description: return "extra_description";
        case Ablation::alternative: return "alternative";
    }
    return "unknown";
}

std::optional<Ablation> ablation_from_name(const std::string& name) {
    if (name == "proposed") return Ablation::proposed;
    if (name == "no_types") return Ablation::no_types;
    if (name == "extra_description") return Ablation::extra_description;
    if (name == "alternative") return Ablation::alternative;
    return std::nullopt;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::correct: return "correct";
        case Verdict::incorrect_logic: return "incorrect_logic";
        case Verdict::error: return "error";
    }
    return "unknown";
}

std::optional<Verdict> verdict_from_name(const std::string& name) {
    if (name == "correct") return Verdict::correct;
    if (name == "incorrect_logic") return Verdict::incorrect_logic;
    if (name == "error") return Verdict::error;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Prompt construction
// ---------------------------------------------------------------------------

std::string build_reference(const Catalog& catalog, Ablation ablation) {
    switch (ablation) {
        case Ablation::no_types: return catalog.emit_reference(ReferenceStyle::no_types);
        case Ablation::extra_description:
            return catalog.emit_reference(ReferenceStyle::extra_description);
        case Ablation::proposed:
        case Ablation::alternative: break;
    }
    // the alternative ablation changes the output format, not the reference
    return catalog.emit_reference(ReferenceStyle::proposed);
}

std::string build_system_prompt(Ablation ablation, const std::string& reference_nodes) {
    std::string text = replace_once(kPromptHead, "{reference_nodes}", reference_nodes);
    text += ablation == Ablation::alternative ? kPromptTailAlternative : kPromptTailPrimary;
    return text;
}

// ---------------------------------------------------------------------------
// Fixture store
// ---------------------------------------------------------------------------

std::string FixtureStore::path_for(Ablation ablation, int run_index) const {
    return dir_ + "/" + ablation_name(ablation) + "_run" + std::to_string(run_index) + ".jsonl";
}

std::map<int, FixtureRecord> FixtureStore::load(Ablation ablation, int run_index) const {
    std::map<int, FixtureRecord> out;
    std::ifstream in(path_for(ablation, run_index));
    if (!in) return out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(DiagCode::MalformedJson,
                 path_for(ablation, run_index) + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("prompt_id") || !j.contains("raw_output"))
            fail(DiagCode::SchemaViolation,
                 path_for(ablation, run_index) + ":" + std::to_string(line_no) +
                     ": fixture records need prompt_id and raw_output");
        FixtureRecord rec;
        rec.prompt_id = j["prompt_id"].get<int>();
        rec.request_hash = j.value("request_hash", std::string());
        rec.raw_output = j["raw_output"].get<std::string>();
        out[rec.prompt_id] = std::move(rec);
    }
    return out;
}

void FixtureStore::append(Ablation ablation, int run_index, const FixtureRecord& rec) const {
    nlohmann::json j;
    j["prompt_id"] = rec.prompt_id;
    j["request_hash"] = rec.request_hash;
    j["raw_output"] = rec.raw_output;
    std::ofstream out(path_for(ablation, run_index), std::ios::app);
    if (!out)
        fail(DiagCode::TransportError, "cannot write " + path_for(ablation, run_index));
    out << j.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Judging
// ---------------------------------------------------------------------------

RunRecord judge_output(Ablation ablation, int run_index, int prompt_id,
                       const std::string& raw_output, const Catalog& catalog,
                       const RunConfig& run_config) {
    RunRecord rec;
    rec.ablation = ablation;
    rec.run_index = run_index;
    rec.prompt_id = prompt_id;
    try {
        std::string json_text = extract_json(raw_output);
        GraphDoc graph = ablation == Ablation::alternative
                             ? alt_to_proposed(parse_alt_graph(json_text), catalog)
                             : parse_graph(json_text);
        std::vector<Diagnostic> diags = validate(graph, catalog);
        for (const auto& d : diags) {
            if (code_severity(d.code) != Severity::error) continue;
            rec.verdict = Verdict::error;
            rec.detail = code_name(d.code);
            rec.failure = d;
            return rec;
        }
        CompiledPlan plan = compile(graph, catalog);
        RunResult result = run(plan, default_schedule(prompt_id), run_config);
        if (result.termination == Termination::runtime_error) {
            rec.verdict = Verdict::error;
            rec.detail = code_name(result.error->code);
            rec.failure = result.error;
            return rec;
        }
        bool ok = prompt_by_id(prompt_id).check(result);
        rec.verdict = ok ? Verdict::correct : Verdict::incorrect_logic;
        rec.detail = ok ? "checker passed" : "checker failed";
        return rec;
    } catch (const PipelineError& e) {
        rec.verdict = Verdict::error;
        rec.detail = code_name(e.diag().code);
        rec.failure = e.diag();
        return rec;
    }
}

// ---------------------------------------------------------------------------
// Annotations
// ---------------------------------------------------------------------------

AnnotationMap parse_annotations(const std::string& csv_text) {
    AnnotationMap notes;
    std::vector<std::string> lines = split_lines(csv_text);
    if (lines.empty())
        fail(DiagCode::SchemaViolation, "annotation CSV is empty");
    if (csv_split(lines[0]) != std::vector<std::string>{"ablation", "run", "prompt_id", "verdict"})
        fail(DiagCode::SchemaViolation,
             "annotation CSV header must be ablation,run,prompt_id,verdict");
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> cols = csv_split(lines[i]);
        if (cols.size() != 4)
            fail(DiagCode::SchemaViolation,
                 "annotation line " + std::to_string(i + 1) + " needs 4 columns");
        if (!ablation_from_name(cols[0]))
            fail(DiagCode::SchemaViolation, "unknown ablation '" + cols[0] + "'");
        auto verdict = verdict_from_name(cols[3]);
        if (!verdict) fail(DiagCode::SchemaViolation, "unknown verdict '" + cols[3] + "'");
        notes[{cols[0], parse_int(cols[1], "run"), parse_int(cols[2], "prompt_id")}] = *verdict;
    }
    return notes;
}

void apply_annotations(std::vector<RunRecord>& records, const AnnotationMap& notes) {
    std::set<AnnotationMap::key_type> matched;
    for (auto& rec : records) {
        AnnotationMap::key_type key{ablation_name(rec.ablation), rec.run_index, rec.prompt_id};
        auto it = notes.find(key);
        if (it == notes.end()) continue;
        matched.insert(key);
        if (rec.verdict == it->second) continue;
        rec.verdict = it->second;
        rec.detail = "annotated";
    }
    // An override naming a record that was never judged is a typo, not a
    // no-op: fail loudly instead of silently dropping the correction.
    for (const auto& [key, verdict] : notes)
        if (!matched.count(key))
            fail(DiagCode::MissingJudgment,
                 "annotation for " + std::get<0>(key) + " run " +
                     std::to_string(std::get<1>(key)) + " prompt " +
                     std::to_string(std::get<2>(key)) + " matches no judged record");
}

// ---------------------------------------------------------------------------
// Bench driver
// ---------------------------------------------------------------------------

std::vector<RunRecord> run_bench(const BenchOptions& options, const Catalog& catalog) {
    struct Task {
        Ablation ablation;
        int run;
        int prompt;
    };
    std::vector<Task> tasks;
    for (Ablation a : options.ablations)
        for (int run = 1; run <= options.runs; ++run)
            for (const auto& p : benchmark_prompts()) tasks.push_back({a, run, p.id});

    FixtureStore store(options.fixtures_dir);

    // replay inputs and live system prompts are prepared up front
    std::map<std::pair<int, int>, std::map<int, FixtureRecord>> replays;
    std::map<int, std::string> system_prompts;
    for (size_t ai = 0; ai < options.ablations.size(); ++ai) {
        Ablation a = options.ablations[ai];
        if (options.mode == BenchMode::replay) {
            for (int run = 1; run <= options.runs; ++run)
                replays[{static_cast<int>(a), run}] = store.load(a, run);
        } else {
            system_prompts[static_cast<int>(a)] =
                build_system_prompt(a, build_reference(catalog, a));
        }
    }

    std::vector<RunRecord> records(tasks.size());
    std::mutex store_mutex;

    auto work = [&](size_t index) {
        const Task& task = tasks[index];
        if (options.mode == BenchMode::replay) {
            const auto& fixture_map = replays[{static_cast<int>(task.ablation), task.run}];
            auto it = fixture_map.find(task.prompt);
            if (it == fixture_map.end()) {
                RunRecord rec;
                rec.ablation = task.ablation;
                rec.run_index = task.run;
                rec.prompt_id = task.prompt;
                rec.verdict = Verdict::error;
                rec.detail = "missing fixture";
                records[index] = rec;
                return;
            }
            records[index] = judge_output(task.ablation, task.run, task.prompt,
                                          it->second.raw_output, catalog, options.run_config);
            return;
        }
        const std::string& system = system_prompts[static_cast<int>(task.ablation)];
        const PromptCase& prompt = prompt_by_id(task.prompt);
        try {
            std::string raw = query_model(options.endpoint, system, prompt.text);
            FixtureRecord fixture;
            fixture.prompt_id = task.prompt;
            fixture.request_hash = request_hash(system, prompt.text);
            fixture.raw_output = raw;
            {
                std::lock_guard<std::mutex> lock(store_mutex);
                store.append(task.ablation, task.run, fixture);
            }
            records[index] = judge_output(task.ablation, task.run, task.prompt, raw, catalog,
                                          options.run_config);
        } catch (const PipelineError& e) {
            RunRecord rec;
            rec.ablation = task.ablation;
            rec.run_index = task.run;
            rec.prompt_id = task.prompt;
            rec.verdict = Verdict::error;
            rec.detail = code_name(e.diag().code);
            rec.failure = e.diag();
            records[index] = rec;
        }
    };

    int workers = std::max(1, options.parallel);
    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) work(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        int n = std::min<size_t>(workers, tasks.size());
        for (int w = 0; w < n; ++w)
            pool.emplace_back([&] {
                while (true) {
                    size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) break;
                    work(i);
                }
            });
        for (auto& t : pool) t.join();
    }

    apply_annotations(records, options.annotations);
    return records;
}

// ---------------------------------------------------------------------------
// Summaries, comparisons, reports
// ---------------------------------------------------------------------------

std::vector<AblationSummary> summarize(const std::vector<RunRecord>& records) {
    std::vector<Ablation> order;
    for (const auto& rec : records)
        if (std::find(order.begin(), order.end(), rec.ablation) == order.end())
            order.push_back(rec.ablation);

    std::vector<AblationSummary> out;
    for (Ablation a : order) {
        std::map<int, std::pair<int, int>> per_run;  // run -> (correct, total)
        for (const auto& rec : records) {
            if (rec.ablation != a) continue;
            auto& slot = per_run[rec.run_index];
            slot.second += 1;
            if (rec.verdict == Verdict::correct) slot.first += 1;
        }
        AblationSummary s;
        s.ablation = a;
        s.prompts = 0;
        for (const auto& [run, counts] : per_run) {
            s.per_run_correct.push_back(counts.first);
            s.per_run_accuracy.push_back(counts.second == 0
                                             ? 0.0
                                             : static_cast<double>(counts.first) /
                                                   static_cast<double>(counts.second));
            s.prompts = std::max(s.prompts, counts.second);
        }
        s.mean_accuracy = s.per_run_accuracy.empty() ? 0.0 : mean(s.per_run_accuracy);
        s.stddev_accuracy =
            s.per_run_accuracy.size() < 2 ? 0.0 : sample_stddev(s.per_run_accuracy);
        out.push_back(std::move(s));
    }
    return out;
}

Comparison compare_ablations(const std::vector<AblationSummary>& summaries, Ablation a,
                             Ablation b) {
    const AblationSummary* sa = nullptr;
    const AblationSummary* sb = nullptr;
    for (const auto& s : summaries) {
        if (s.ablation == a) sa = &s;
        if (s.ablation == b) sb = &s;
    }
    if (!sa || !sb)
        fail(DiagCode::DegenerateSample, "comparison needs summaries for both ablations");
    Comparison cmp{a, b, welch_t_test(sa->per_run_accuracy, sb->per_run_accuracy)};
    return cmp;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::string out = "ablation,run,prompt_id,verdict,detail\n";
    for (const auto& rec : records) {
        out += csv_field(ablation_name(rec.ablation));
        out += ',';
        out += std::to_string(rec.run_index);
        out += ',';
        out += std::to_string(rec.prompt_id);
        out += ',';
        out += csv_field(verdict_name(rec.verdict));
        out += ',';
        out += csv_field(rec.detail);
        out += '\n';
    }
    return out;
}

std::vector<RunRecord> records_from_csv(const std::string& csv_text) {
    std::vector<std::string> lines = split_lines(csv_text);
    if (lines.empty()) fail(DiagCode::SchemaViolation, "records CSV is empty");
    if (csv_split(lines[0]) !=
        std::vector<std::string>{"ablation", "run", "prompt_id", "verdict", "detail"})
        fail(DiagCode::SchemaViolation,
             "records CSV header must be ablation,run,prompt_id,verdict,detail");
    std::vector<RunRecord> out;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> cols = csv_split(lines[i]);
        if (cols.size() != 5)
            fail(DiagCode::SchemaViolation,
                 "records line " + std::to_string(i + 1) + " needs 5 columns");
        auto ablation = ablation_from_name(cols[0]);
        auto verdict = verdict_from_name(cols[3]);
        if (!ablation) fail(DiagCode::SchemaViolation, "unknown ablation '" + cols[0] + "'");
        if (!verdict) fail(DiagCode::SchemaViolation, "unknown verdict '" + cols[3] + "'");
        RunRecord rec;
        rec.ablation = *ablation;
        rec.run_index = parse_int(cols[1], "run");
        rec.prompt_id = parse_int(cols[2], "prompt_id");
        rec.verdict = *verdict;
        rec.detail = cols[4];
        out.push_back(std::move(rec));
    }
    return out;
}

std::string render_report(const std::vector<AblationSummary>& summaries,
                          const std::vector<Comparison>& comparisons) {
    std::ostringstream os;
    char buf[160];
    os << "ablation            runs  mean accuracy  std dev\n";
    for (const auto& s : summaries) {
        std::snprintf(buf, sizeof(buf), "%-18s  %4zu  %13.3f  %7.4f\n", ablation_name(s.ablation),
                      s.per_run_accuracy.size(), s.mean_accuracy, s.stddev_accuracy);
        os << buf;
    }
    if (!comparisons.empty()) os << "\n";
    for (const auto& c : comparisons) {
        std::snprintf(buf, sizeof(buf), "%s vs %s: t = %.3f, df = %.2f, p = %.4g\n",
                      ablation_name(c.a), ablation_name(c.b), c.test.t, c.test.df, c.test.p);
        os << buf;
    }
    return os.str();
}

std::string summary_to_csv(const std::vector<AblationSummary>& summaries) {
    std::string out = "ablation,run,correct,prompts,accuracy\n";
    for (const auto& s : summaries)
        for (size_t i = 0; i < s.per_run_correct.size(); ++i) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%zu,%d,%d,%.4f\n", ablation_name(s.ablation),
                          i + 1, s.per_run_correct[i], s.prompts, s.per_run_accuracy[i]);
            out += buf;
        }
    return out;
}

}  // namespace graphblocks
