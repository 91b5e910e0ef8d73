#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "depfix/resolver.hpp"

using namespace depfix;

namespace {

const std::string kFixtures = DEPFIX_FIXTURES_DIR;

MappingSet fixture_mappings() {
    return load_mappings(kFixtures + "/mappings.json");
}

py::ModuleIndex parse_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return py::parse_module(buf.str());
}

}  // namespace

TEST_CASE("alias table entries and shadowing") {
    py::ModuleIndex mod = py::parse_module(
        "import pandas as pd\n"
        "from torch.linalg import lstsq\n"
        "import numpy\n"
        "import polars as pd\n");
    AliasTable table = build_alias_table(mod);
    CHECK(table.lookup("pd", 2)->target == "pandas");
    CHECK(table.lookup("pd")->target == "polars");  // later import shadows
    CHECK(table.lookup("lstsq")->target == "torch.linalg.lstsq");
    CHECK(table.lookup("numpy")->target == "numpy");
    CHECK(table.lookup("missing") == nullptr);
}

TEST_CASE("object type table from constructor-style assigns") {
    py::ModuleIndex mod = py::parse_module(
        "import pandas as pd\n"
        "def f(data):\n"
        "    dt = pd.DataFrame(data)\n"
        "    x = 3\n"
        "    y = unknown_factory(data)\n");
    AliasTable aliases = build_alias_table(mod, 0);
    ObjectTypeTable objects = build_object_type_table(mod.functions[0], aliases);
    REQUIRE(objects.lookup("dt", 10));
    CHECK(objects.lookup("dt", 10)->type.dotted() == "pandas.DataFrame");
    CHECK(objects.lookup("x", 10) == nullptr);
    CHECK(objects.lookup("y", 10) == nullptr);
    CHECK(objects.lookup("dt", 3) == nullptr);  // assigns strictly before the use
}

TEST_CASE("resolution fixture corpus resolves every annotated call") {
    using nlohmann::json;
    std::ifstream in(kFixtures + "/resolution/expected.json");
    REQUIRE(in);
    json expected;
    in >> expected;

    for (const json& entry : expected) {
        std::string file = entry.at("file").get<std::string>();
        int line = entry.at("line").get<int>();
        py::ModuleIndex mod = parse_file(kFixtures + "/resolution/" + file);

        const ResolvedCall* found = nullptr;
        ResolvedCall storage;
        for (std::size_t fi = 0; fi < mod.functions.size(); ++fi) {
            SourceFunction sf = resolve_function(mod, static_cast<int>(fi), file);
            for (const auto& call : sf.calls) {
                if (call.line == line &&
                    call.callee_text == entry.at("callee").get<std::string>()) {
                    storage = call;
                    found = &storage;
                }
            }
        }
        INFO(file << ":" << line << " " << entry.at("callee").get<std::string>());
        REQUIRE(found != nullptr);
        if (entry.at("fqn").is_null()) {
            CHECK_FALSE(found->fqn.has_value());
        } else {
            REQUIRE(found->fqn.has_value());
            CHECK(found->fqn->dotted() == entry.at("fqn").get<std::string>());
        }
        CHECK(to_string(found->kind) == entry.at("kind").get<std::string>());
    }
}

TEST_CASE("match_corpus on the small corpus") {
    MappingSet mappings = fixture_mappings();
    ScanResult result = match_corpus(kFixtures + "/corpus_small", mappings);
    REQUIRE(result.matches.size() == 4);

    // deterministic (path, line) order
    CHECK(result.matches[0].function.file.find("s1_outdated.py") != std::string::npos);
    CHECK(result.matches[0].kind == MatchKind::outdated);
    CHECK(result.matches[0].reference_call.fqn->dotted() == "torch.lstsq");
    CHECK(result.matches[1].kind == MatchKind::up_to_dated);
    CHECK(result.matches[2].function.file.find("s3_firstline.py") != std::string::npos);
    CHECK(result.matches[3].reference_call.fqn->dotted() == "pandas.DataFrame.append");
    CHECK(result.matches[3].kind == MatchKind::outdated);

    // broken file surfaces as a warning, not a failure
    bool broken_warned = false;
    for (const auto& w : result.warnings)
        if (w.find("s6_broken.py") != std::string::npos) broken_warned = true;
    CHECK(broken_warned);
}

TEST_CASE("first-match picks the earliest mapped call") {
    MappingSet mappings = fixture_mappings();
    py::ModuleIndex mod = py::parse_module(
        "import torch\n"
        "def f(a, b):\n"
        "    x = torch.lstsq(a, b)\n"
        "    pad = 0\n"
        "    y = torch.linalg.lstsq(a, b)\n"
        "    return x, y\n");
    auto matches = match_module(mod, "mem.py", mappings);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].reference_call.line == 3);
    CHECK(matches[0].kind == MatchKind::outdated);

    // brute-force: no earlier call resolves to any mapped FQN
    SourceFunction sf = resolve_function(mod, 0, "mem.py");
    for (const auto& call : sf.calls) {
        if (call.line >= matches[0].reference_call.line) break;
        if (!call.fqn) continue;
        CHECK_FALSE(mappings.find_by_deprecated(*call.fqn));
        CHECK_FALSE(mappings.find_by_replacement(*call.fqn));
    }
}

TEST_CASE("scanning the same corpus twice is byte-identical") {
    MappingSet mappings = fixture_mappings();
    auto render = [&] {
        std::string out;
        for (const auto& m : match_corpus(kFixtures + "/corpus_small", mappings).matches) {
            out += m.function.file + "|" + m.function.qualified_name + "|" +
                   std::to_string(m.reference_call.line) + "|" +
                   m.reference_call.fqn->dotted() + "\n";
        }
        return out;
    };
    CHECK(render() == render());
}

TEST_CASE("match context imports carry the import statements in scope") {
    MappingSet mappings = fixture_mappings();
    ScanResult result = match_corpus(kFixtures + "/corpus_e2e", mappings);
    for (const auto& m : result.matches) {
        INFO(m.function.file);
        CHECK_FALSE(m.context_imports.empty());
    }
}
