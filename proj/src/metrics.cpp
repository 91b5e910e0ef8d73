#include "depfix/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <tuple>

#include <json.hpp>

#include "depfix/pysrc.hpp"

namespace depfix {

using nlohmann::json;

double aup(const std::vector<VerdictLabel>& verdicts) {
    if (verdicts.empty()) throw UndefinedMetric("AUP undefined on an empty dataset");
    std::size_t plausible = 0;
    for (auto v : verdicts)
        if (v != VerdictLabel::irrelevant) ++plausible;
    return static_cast<double>(plausible) / static_cast<double>(verdicts.size());
}

double dur(const std::vector<VerdictLabel>& verdicts) {
    std::size_t plausible = 0, bad = 0;
    for (auto v : verdicts) {
        if (v == VerdictLabel::irrelevant) continue;
        ++plausible;
        if (v == VerdictLabel::bad) ++bad;
    }
    if (plausible == 0) throw UndefinedMetric("DUR undefined without plausible verdicts");
    return static_cast<double>(bad) / static_cast<double>(plausible);
}

double fixed_rate(const std::vector<FixStatus>& outcomes) {
    std::size_t attempted = 0, fixed = 0;
    for (auto s : outcomes) {
        if (s == FixStatus::strategy_unsupported) continue;
        ++attempted;
        if (s == FixStatus::fixed) ++fixed;
    }
    if (attempted == 0) throw UndefinedMetric("FR undefined without attempted fixes");
    return static_cast<double>(fixed) / static_cast<double>(attempted);
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? diag : diag + 1;
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, cost});
        }
    }
    return row[b.size()];
}

static std::string strip(const std::string& s) {
    std::size_t first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    std::size_t last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double edit_similarity(const std::string& a, const std::string& b) {
    std::string sa = strip(a), sb = strip(b);
    std::size_t longest = std::max(sa.size(), sb.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(sa, sb)) / static_cast<double>(longest);
}

namespace {

struct Span {
    int begin;  // byte offsets into the line
    int end;
};

// Character spans of the assignment-target elements left of a top-level
// `=`, splitting tuple elements (one wrapping paren/bracket level deep).
// Returns false when the line is not a plain assignment.
bool target_spans(const std::string& line, std::vector<Span>& spans) {
    // locate the top-level plain `=`
    int depth = 0;
    int eq = -1;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if (c == ')' || c == ']' || c == '}') --depth;
        else if (c == '\'' || c == '"') {
            char q = c;
            for (++i; i < line.size() && line[i] != q; ++i)
                if (line[i] == '\\') ++i;
        } else if (c == '#') {
            break;
        } else if (depth == 0 && c == '=') {
            bool aug = i > 0 && std::string("=!<>+-*/%&|^:@~").find(line[i - 1]) !=
                                    std::string::npos;
            bool eqeq = i + 1 < line.size() && line[i + 1] == '=';
            if (aug || eqeq) {
                if (eqeq) ++i;
                continue;
            }
            eq = static_cast<int>(i);
            break;
        }
    }
    if (eq <= 0) return false;

    // split [0, eq) into elements at depth-0 commas, unwrapping one outer
    // paren/bracket group when it spans the whole target list
    std::function<void(int, int)> split = [&](int begin, int end) {
        while (begin < end && (line[begin] == ' ' || line[begin] == '\t')) ++begin;
        while (end > begin && (line[end - 1] == ' ' || line[end - 1] == '\t')) --end;
        if (begin >= end) return;
        if (line[begin] == '(' || line[begin] == '[') {
            // does the group close exactly at the end?
            int d = 0;
            for (int i = begin; i < end; ++i) {
                if (line[i] == '(' || line[i] == '[') ++d;
                else if (line[i] == ')' || line[i] == ']') {
                    --d;
                    if (d == 0 && i != end - 1) { d = -1; break; }
                }
            }
            if (d == 0) {
                split(begin + 1, end - 1);
                return;
            }
        }
        int d = 0, start = begin;
        bool any_comma = false;
        for (int i = begin; i < end; ++i) {
            char c = line[i];
            if (c == '(' || c == '[' || c == '{') ++d;
            else if (c == ')' || c == ']' || c == '}') --d;
            else if (c == ',' && d == 0) {
                any_comma = true;
                int e = i;
                while (e > start && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
                if (e > start) spans.push_back({start, e});
                start = i + 1;
                while (start < end && (line[start] == ' ' || line[start] == '\t')) ++start;
            }
        }
        int e = end;
        if (e > start) spans.push_back({start, e});
        (void)any_comma;
    };
    split(0, eq);
    return !spans.empty();
}

}  // namespace

std::string normalize_return_values(const std::string& line, bool* failed) {
    if (failed) *failed = false;
    std::vector<Span> spans;
    bool is_assign = false;
    try {
        is_assign = target_spans(line, spans);
    } catch (const std::exception&) {
        if (failed) *failed = true;
        return line;
    }
    if (!is_assign) return line;

    std::string out = line;
    for (auto it = spans.rbegin(); it != spans.rend(); ++it)
        out.replace(static_cast<std::size_t>(it->begin),
                    static_cast<std::size_t>(it->end - it->begin), "_");
    return out;
}

bool exact_match(const std::string& pred, const std::string& truth) {
    return strip(normalize_return_values(pred)) == strip(normalize_return_values(truth));
}

// ---------------------------------------------------------------------------
// grouped reports

std::string format_metric(const std::optional<double>& value) {
    if (!value) return "—";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *value);
    return buf;
}

namespace {

using GroupKey = std::tuple<std::string, std::string, std::string>;  // backend, library, dataset

void validate_keys(const std::vector<std::string>& group_by) {
    for (const auto& k : group_by)
        if (k != "backend" && k != "library" && k != "dataset")
            throw UsageError("unknown group key: " + k +
                             " (expected backend, library, or dataset)");
}

bool wants(const std::vector<std::string>& group_by, const std::string& key) {
    return std::find(group_by.begin(), group_by.end(), key) != group_by.end();
}

template <typename Record>
std::vector<GroupKey> keys_for(const Record& r, const std::vector<std::string>& group_by) {
    std::string backend = wants(group_by, "backend") ? r.backend : "*";
    std::string library = wants(group_by, "library") ? r.library : "*";
    std::vector<GroupKey> keys;
    if (wants(group_by, "dataset")) {
        keys.emplace_back(backend, library, r.dataset);
        keys.emplace_back(backend, library, "All");
    } else {
        keys.emplace_back(backend, library, "*");
    }
    return keys;
}

}  // namespace

Report build_report(const std::vector<AnnotatedRecord>& annotated,
                    const std::vector<FixRecord>& fixed,
                    const std::vector<std::string>& group_by) {
    validate_keys(group_by);
    Report report;

    std::map<GroupKey, std::vector<VerdictLabel>> verdict_groups;
    for (const auto& r : annotated)
        for (const auto& key : keys_for(r, group_by)) verdict_groups[key].push_back(r.label);

    for (const auto& [key, labels] : verdict_groups) {
        MetricRow row;
        std::tie(row.backend, row.library, row.dataset) = key;
        row.n_samples = labels.size();
        for (auto l : labels) {
            if (l == VerdictLabel::good) ++row.n_good;
            else if (l == VerdictLabel::bad) ++row.n_bad;
            else ++row.n_irrelevant;
        }
        try {
            row.aup = aup(labels);
        } catch (const UndefinedMetric&) {}
        try {
            row.dur = dur(labels);
        } catch (const UndefinedMetric&) {}
        report.rows.push_back(std::move(row));
    }

    using FixKey = std::tuple<std::string, std::string, std::string, std::string>;
    std::map<FixKey, std::vector<const FixRecord*>> fix_groups;
    for (const auto& r : fixed)
        for (const auto& key : keys_for(r, group_by))
            fix_groups[std::tuple_cat(key, std::make_tuple(r.strategy))].push_back(&r);

    for (const auto& [key, records] : fix_groups) {
        FixMetricRow row;
        std::tie(row.backend, row.library, row.dataset, row.strategy) = key;
        std::vector<FixStatus> statuses;
        double es_sum = 0.0;
        std::size_t es_n = 0, em_n = 0, with_comp = 0;
        for (const FixRecord* r : records) {
            statuses.push_back(r->status);
            if (r->status == FixStatus::strategy_unsupported) {
                ++row.n_unsupported;
                continue;
            }
            ++row.n;
            if (r->status == FixStatus::fixed || r->status == FixStatus::not_fixed) {
                ++with_comp;
                es_sum += edit_similarity(r->fixed_comp, r->ground_truth);
                ++es_n;
                if (exact_match(r->fixed_comp, r->ground_truth)) ++em_n;
            }
        }
        try {
            row.fr = fixed_rate(statuses);
        } catch (const UndefinedMetric&) {}
        if (es_n > 0) row.es = es_sum / static_cast<double>(es_n);
        if (with_comp > 0) row.em = static_cast<double>(em_n) / static_cast<double>(with_comp);
        report.fix_rows.push_back(std::move(row));
    }
    return report;
}

std::string report_to_json(const Report& report) {
    json doc;
    doc["rows"] = json::array();
    for (const auto& r : report.rows) {
        json row{{"backend", r.backend},       {"library", r.library},
                 {"dataset", r.dataset},       {"n_samples", r.n_samples},
                 {"n_good", r.n_good},         {"n_bad", r.n_bad},
                 {"n_irrelevant", r.n_irrelevant}};
        row["aup"] = r.aup ? json(format_metric(r.aup)) : json(nullptr);
        row["dur"] = r.dur ? json(format_metric(r.dur)) : json(nullptr);
        doc["rows"].push_back(std::move(row));
    }
    doc["fix_rows"] = json::array();
    for (const auto& r : report.fix_rows) {
        json row{{"backend", r.backend},
                 {"library", r.library},
                 {"dataset", r.dataset},
                 {"strategy", r.strategy},
                 {"n", r.n},
                 {"n_unsupported", r.n_unsupported}};
        row["fr"] = r.fr ? json(format_metric(r.fr)) : json(nullptr);
        row["es"] = r.es ? json(format_metric(r.es)) : json(nullptr);
        row["em"] = r.em ? json(format_metric(r.em)) : json(nullptr);
        doc["fix_rows"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const Report& report) {
    std::string out = "kind,backend,library,dataset,strategy,n,n_good,n_bad,n_irrelevant,"
                      "aup,dur,fr,es,em\n";
    for (const auto& r : report.rows) {
        out += "completion," + r.backend + "," + r.library + "," + r.dataset + ",," +
               std::to_string(r.n_samples) + "," + std::to_string(r.n_good) + "," +
               std::to_string(r.n_bad) + "," + std::to_string(r.n_irrelevant) + "," +
               format_metric(r.aup) + "," + format_metric(r.dur) + ",,,\n";
    }
    for (const auto& r : report.fix_rows) {
        out += "fix," + r.backend + "," + r.library + "," + r.dataset + "," + r.strategy + "," +
               std::to_string(r.n) + ",,,,,," + format_metric(r.fr) + "," + format_metric(r.es) +
               "," + format_metric(r.em) + "\n";
    }
    return out;
}

}  // namespace depfix
