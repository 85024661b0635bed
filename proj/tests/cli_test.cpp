#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "commands.hpp"
#include "gfmlab/analysis.hpp"
#include "gfmlab/trace.hpp"
#include "svg_plot.hpp"

using namespace gfm;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("gfmlab_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    return read_trace_csv(in);
}

std::string report_value(const std::string& report, const std::string& key) {
    const std::regex re("(^|\n)" + key + "=([^\n]*)");
    std::smatch m;
    REQUIRE(std::regex_search(report, m, re));
    return m[2];
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<double> polyline_ys(const std::string& svg) {
    // Plain search: std::regex recurses per character and overflows the
    // stack on a long points list.
    const auto series = svg.find("class=\"series\"");
    REQUIRE(series != std::string::npos);
    const auto open = svg.find("points=\"", series);
    REQUIRE(open != std::string::npos);
    const auto begin = open + 8;
    const auto end = svg.find('"', begin);
    REQUIRE(end != std::string::npos);
    std::vector<double> ys;
    std::istringstream pts(svg.substr(begin, end - begin));
    std::string pair;
    while (pts >> pair) ys.push_back(std::stod(pair.substr(pair.find(',') + 1)));
    return ys;
}

double attribute(const std::string& svg, const std::string& element_regex, const std::string& attr) {
    const std::regex re(element_regex + "[^>]*" + attr + "=\"([^\"]*)\"");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, re));
    return std::stod(m[1]);
}

}  // namespace

TEST_CASE("list names every builtin", "[cli]") {
    const auto r = invoke({"list"});
    CHECK(r.code == cli::kExitOk);
    for (const char* name : {"fig7", "fig8", "fig9", "fig10a", "fig10b"}) {
        CHECK(r.out.find(name) != std::string::npos);
    }
}

TEST_CASE("run fig9 writes the canonical CSV and reports the settled power", "[cli]") {
    TempDir dir;
    const auto csv = dir.file("fig9.csv");
    const auto r = invoke({"run", "fig9", "-o", csv});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(std::stod(report_value(r.out, "steady_state_mean")) == Approx(0.9).margin(0.02));
    CHECK(report_value(r.out, "sync_held") == "true");

    const std::string text = slurp(csv);
    CHECK(text.substr(0, text.find('\n')) ==
          "time_s,f_grid_hz,f_pll_hz,p_pu,q_pu,p_ref_eff_pu,delta_i_rad,delta_pcc_rad,delta_g_rad,i_d_pu,i_q_pu,"
          "i_mag_pu,v_pcc_mag_pu,soc,sat_power,sat_current");
    const auto tr = load_trace(csv);
    CHECK(analyze_trace(tr).steady_state_mean == Approx(0.9).margin(0.02));
}

TEST_CASE("run fig7 reports oscillation and still exits 0", "[cli]") {
    const auto r = invoke({"run", "fig7"});
    CHECK(r.code == cli::kExitOk);
    CHECK(report_value(r.out, "oscillation_detected") == "true");
}

TEST_CASE("run with an unknown scenario names the builtins", "[cli]") {
    const auto r = invoke({"run", "missing-name"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("missing-name") != std::string::npos);
    CHECK(r.err.find("fig9") != std::string::npos);
}

TEST_CASE("run accepts a JSON config and overrides", "[cli]") {
    TempDir dir;
    const auto cfg = dir.file("cfg.json");
    std::ofstream(cfg) << R"({"base": "table1", "p_ref": 0.3, "soc_policy": false, "t_end": 2.0})";
    const auto r = invoke({"run", cfg, "--set", "hybrid.d=5", "--t-end", "1.5", "--dt", "1e-4", "--seedless",
                        "-o", dir.file("t.csv")});
    REQUIRE(r.code == cli::kExitOk);
    const auto tr = load_trace(dir.file("t.csv"));
    CHECK(tr.samples.back().t == Approx(1.5));
    CHECK(std::stod(report_value(r.out, "steady_state_mean")) == Approx(0.3).margin(0.01));
}

TEST_CASE("diverged runs exit 2 and keep the partial trace", "[cli]") {
    TempDir dir;
    const auto r = invoke({"run", "fig9", "--set", "inner.kp_i=100", "--set", "pre_roll=0", "-o", dir.file("d.csv")});
    CHECK(r.code == cli::kExitDiverged);
    CHECK(r.err.find("error:") != std::string::npos);
    REQUIRE(fs::exists(dir.file("d.csv")));
    CHECK_NOTHROW(load_trace(dir.file("d.csv")));
}

TEST_CASE("sweep fig10a over the RoCoF family stays under the power limit", "[cli]") {
    TempDir dir;
    const auto r = invoke({"sweep", "fig10a", "rocof", "--values=-0.5,-1,-2", "-o", dir.path().string()});
    REQUIRE(r.code == cli::kExitOk);
    for (int k = 0; k < 3; ++k) {
        const auto tr = load_trace(dir.file("fig10a_" + std::to_string(k) + ".csv"));
        const auto m = analyze_trace(tr);
        CHECK(m.max_power <= 1.02);
        CHECK(m.sync_held);
    }
    const auto summary = slurp(dir.file("summary.csv"));
    CHECK(count(summary, "\n") == 4);
    CHECK(count(summary, ",ok,") == 3);
}

TEST_CASE("sweep fig10b over the RoCoF family holds zero power", "[cli]") {
    TempDir dir;
    const auto r = invoke({"sweep", "fig10b", "rocof", "--values=0.5,1,2", "-o", dir.path().string()});
    REQUIRE(r.code == cli::kExitOk);
    for (int k = 0; k < 3; ++k) {
        const auto tr = load_trace(dir.file("fig10b_" + std::to_string(k) + ".csv"));
        for (const auto& x : tr.samples) {
            if (x.t >= 1.0) REQUIRE(std::abs(x.p) <= 0.02);
        }
        CHECK_FALSE(analyze_trace(tr).soc_violated);
    }
}

TEST_CASE("sweep with no values exits 1 and writes nothing", "[cli]") {
    TempDir dir;
    const auto out = dir.file("never");
    const auto r = invoke({"sweep", "fig10a", "rocof", "-o", out});
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("linear strong prints unit DC gain", "[cli]") {
    const auto r = invoke({"linear", "strong", "--base", "table1"});
    CHECK(r.code == cli::kExitOk);
    CHECK(report_value(r.out, "dc_gain") == "1.000");
    CHECK(report_value(r.out, "stable") == "true");
}

TEST_CASE("linear weak writes a step response that settles at 1", "[cli]") {
    TempDir dir;
    const auto csv = dir.file("step.csv");
    const auto r = invoke({"linear", "weak", "--base", "table1", "-o", csv});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream in(csv);
    std::string line, last;
    std::getline(in, line);
    CHECK(line == "time_s,value");
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    CHECK(std::stod(last.substr(last.find(',') + 1)) == Approx(1.0).margin(1e-3));
    CHECK(fs::exists(dir.file("step.model.txt")));
}

TEST_CASE("linear exact lists only left-half-plane poles", "[cli]") {
    const auto r = invoke({"linear", "exact", "--scr", "1.2"});
    REQUIRE(r.code == cli::kExitOk);
    const std::regex re("pole=([-+0-9.eE]+)");
    int poles = 0;
    for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), re); it != std::sregex_iterator(); ++it) {
        CHECK(std::stod((*it)[1]) < 0.0);
        ++poles;
    }
    CHECK(poles >= 2);
    CHECK(invoke({"linear", "sideways"}).code == cli::kExitUsage);
}

TEST_CASE("plot fig9 power gives one polyline over at least [0, 1]", "[cli][plot]") {
    TempDir dir;
    REQUIRE(invoke({"run", "fig9", "-o", dir.file("fig9.csv")}).code == cli::kExitOk);
    const auto svg_path = dir.file("p.svg");
    REQUIRE(invoke({"plot", dir.file("fig9.csv"), "-c", "p_pu", "-o", svg_path, "--title", "P"}).code == cli::kExitOk);
    const auto svg = slurp(svg_path);
    CHECK(count(svg, "<polyline") == 1);
    CHECK(attribute(svg, "<g class=\"y-axis\"", "data-min") <= 0.0);
    CHECK(attribute(svg, "<g class=\"y-axis\"", "data-max") >= 1.0);
}

TEST_CASE("plot of SoC without a limit policy crosses the 0.9 line", "[cli][plot]") {
    TempDir dir;
    REQUIRE(invoke({"run", "fig8", "--set", "i_lim=1.2", "--set", "soc_policy=0", "-o", dir.file("soc.csv")}).code ==
            cli::kExitOk);
    const auto svg_path = dir.file("soc.svg");
    REQUIRE(invoke({"plot", dir.file("soc.csv"), "-c", "soc", "--hline", "0.9", "-o", svg_path}).code == cli::kExitOk);
    const auto svg = slurp(svg_path);
    const double y09 = attribute(svg, "<line class=\"reference\" data-value=\"0.9\"", "y1");
    const auto ys = polyline_ys(svg);
    // SVG y grows downward: below the line first, above it later.
    CHECK(ys.front() >= y09 - 0.01);
    CHECK(*std::min_element(ys.begin(), ys.end()) < y09 - 1.0);
}

TEST_CASE("plot with an unknown column exits 1", "[cli][plot]") {
    TempDir dir;
    REQUIRE(invoke({"run", "fig10b", "--t-end", "0.2", "-o", dir.file("t.csv")}).code == cli::kExitOk);
    const auto r = invoke({"plot", dir.file("t.csv"), "-c", "bogus", "-o", dir.file("x.svg")});
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(fs::exists(dir.file("x.svg")));
}

TEST_CASE("usage errors and help", "[cli]") {
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
    CHECK(invoke({"run"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "fig9", "--dt", "abc"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "fig9", "--set", "p_ref"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "fig9", "--set", "p_ref=x"}).code == cli::kExitUsage);
    CHECK(invoke({"run", "fig9", "--dt", "0.5"}).code == cli::kExitUsage);
    const auto help = invoke({"--help"});
    CHECK(help.code == cli::kExitOk);
    CHECK(help.out.find("sweep") != std::string::npos);
}

TEST_CASE("malformed configs always produce a diagnostic and exit 1 or 2", "[cli][fuzz]") {
    TempDir dir;
    const std::vector<std::string> seeds = {
        R"({"base": "table1", "p_ref": 0.3, "t_end": 0.2, "pre_roll": 0.5})",
        R"({"base": "fig9", "hybrid": {"kp_p": 1.0, "d": 10}, "t_end": 0.2, "pre_roll": 0.5})",
        R"({"controller": "pf_gfm", "circuit": {"scr": 1.2}, "t_end": 0.2, "pre_roll": 0.5})",
    };
    const std::string alphabet = "{}[]\":,.-+0123456789eEabcdefghijklmnopqrstuvwxyz_ \n";
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick_op(0, 3);
    int failures = 0;
    for (int trial = 0; trial < 150; ++trial) {
        std::string text = seeds[trial % seeds.size()];
        const int edits = 1 + trial % 4;
        for (int e = 0; e < edits && !text.empty(); ++e) {
            std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
            std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
            switch (pick_op(rng)) {
                case 0: text[pos(rng)] = alphabet[ch(rng)]; break;
                case 1: text.erase(pos(rng), 1); break;
                case 2: text.insert(pos(rng), 1, alphabet[ch(rng)]); break;
                default: text = text.substr(0, pos(rng)); break;
            }
        }
        const auto cfg = dir.file("fuzz.json");
        std::ofstream(cfg, std::ios::trunc) << text;
        const auto r = invoke({"run", cfg});
        INFO("config: " << text);
        REQUIRE((r.code == cli::kExitOk || r.code == cli::kExitUsage || r.code == cli::kExitDiverged));
        if (r.code != cli::kExitOk) {
            CHECK(r.err.find("error:") != std::string::npos);
            ++failures;
        }
    }
    CHECK(failures > 0);
}

TEST_CASE("nice_ticks picks 1-2-5 steps covering the range", "[cli][plot]") {
    const auto t = cli::nice_ticks(0.0, 1.0);
    CHECK(t.front() == 0.0);
    CHECK(t.back() >= 1.0);
    CHECK(t[1] - t[0] == Approx(0.2));
    const auto u = cli::nice_ticks(-0.013, 0.027, 4);
    CHECK(u.front() <= -0.013);
    CHECK(u.back() >= 0.027);
}

TEST_CASE("render_svg is deterministic and rejects unknown columns", "[cli][plot]") {
    Trace tr;
    for (int k = 0; k < 5; ++k) {
        TraceSample s;
        s.t = 0.1 * k;
        s.p = 0.2 * k;
        tr.samples.push_back(s);
    }
    CHECK(cli::render_svg(tr, {"p_pu", "q_pu"}) == cli::render_svg(tr, {"p_pu", "q_pu"}));
    CHECK(count(cli::render_svg(tr, {"p_pu", "q_pu"}), "<polyline") == 2);
    CHECK_THROWS_AS(cli::render_svg(tr, {"nope"}), std::out_of_range);
}
