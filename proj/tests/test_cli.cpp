#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wfc/config.hpp"
#include "wfc/csv.hpp"
#include "wfc/scenario.hpp"
#include "wfc/units.hpp"

using namespace wfc;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text, scenario::Command command = scenario::Command::ServiceCurve) {
    try {
        for (const auto& sec : config::parse(text, "t.conf")) scenario::resolve(sec, command);
    } catch (const config::ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kVbrCurve = R"(# comment
[vbr]
slot_ms = 1
seed = 3
service = vbr
service_rate_Mbps = 1000
delay_ms = 1, 5
window_rate_Mbps = 100
eps = 1e-6
horizon_ms = 30
)";

}  // namespace

TEST_CASE("unit conversions round-trip through text") {
    for (double mbps : {1.0, 95.0, 100.0, 1000.0, 1125.0, 0.3})
        for (double slot : {0.1, 1.0, 2.5}) {
            const double there = units::mbps_to_mb_per_slot(mbps, slot);
            CHECK(csv::format_number(units::mb_per_slot_to_mbps(there, slot)) == csv::format_number(mbps));
        }
    for (double theta : {1e-8, 3.3e-6, 1e-3})
        CHECK(csv::format_number(units::theta_per_mb_to_per_bit(units::theta_per_bit_to_per_mb(theta))) ==
              csv::format_number(theta));
    CHECK(units::ms_to_slots(50.0) == 50);
    CHECK(units::ms_to_slots(5.0, 0.5) == 10);
    CHECK_THROWS(units::ms_to_slots(1.5));
    CHECK(units::slots_to_ms(10, 0.5) == 5.0);
}

TEST_CASE("number formatting") {
    CHECK(csv::format_number(0.1) == "0.1");
    CHECK(csv::format_number(1e-6) == "1e-06");
    CHECK(csv::format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(csv::format_number(std::numeric_limits<double>::quiet_NaN()).empty());
    csv::Table t{{"a", "b"}, {{"1", "x,y"}}};
    CHECK(t.str() == "a,b\n1,\"x,y\"\n");
}

TEST_CASE("atomic writes") {
    const auto dir = std::filesystem::temp_directory_path() / "wfc_test_cli";
    std::filesystem::create_directories(dir);
    csv::write_atomic(dir / "x.csv", "hello\n");
    CHECK(slurp(dir / "x.csv") == "hello\n");
    CHECK_FALSE(std::filesystem::exists(dir / "x.csv.tmp"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("config syntax errors name the line") {
    CHECK(error_of("x = 1\n").find("t.conf:1:") != std::string::npos);
    CHECK(error_of("[a]\nk = 1\n\n[a\n").find("t.conf:4:") != std::string::npos);
    CHECK(error_of("[a]\nk = 1\nk = 2\n").find("t.conf:3:") != std::string::npos);
    CHECK(error_of("[a]\nk\n").find("t.conf:2:") != std::string::npos);
    CHECK(error_of("[a]\n[a]\n").find("t.conf:2:") != std::string::npos);
}

TEST_CASE("config schema errors name the line") {
    std::string text = kVbrCurve;
    CHECK(error_of(text).empty());

    auto with = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        t.replace(t.find(from), from.size(), to);
        return error_of(t);
    };
    CHECK(with("service_rate_Mbps = 1000", "service_rate_Mbps = fast").find("t.conf:6:") != std::string::npos);
    CHECK(with("eps = 1e-6", "eps = 2").find("t.conf:9:") != std::string::npos);
    CHECK(with("horizon_ms = 30", "horizon_ms = 30\nbogus = 1").find("t.conf:11:") != std::string::npos);
    CHECK(with("window_rate_Mbps = 100", "window_rate_Mbps = 100\nwindow_Mb = 1").find("t.conf:") != std::string::npos);
    CHECK(with("seed = 3\n", "").find("seed") != std::string::npos);
    CHECK(error_of(text, scenario::Command::EffectiveCapacity).find("t.conf:9:") != std::string::npos);
}

TEST_CASE("scenario resolution converts units") {
    const auto sections = config::parse(kVbrCurve, "t.conf");
    const auto s = scenario::resolve(sections.at(0), scenario::Command::ServiceCurve);
    REQUIRE(s.feedback.size() == 2);
    CHECK(s.feedback[1].params.delay() == 5);
    CHECK(s.feedback[1].params.window() == doctest::Approx(0.5));
    CHECK(s.horizon == 30);
    CHECK(s.seed == 3);
    CHECK(scenario::resolve(sections.at(0), scenario::Command::ServiceCurve, 99).seed == 99);
}

TEST_CASE("tables are deterministic") {
    const auto sections = config::parse(kVbrCurve, "t.conf");
    const auto s = scenario::resolve(sections.at(0), scenario::Command::ServiceCurve);
    const auto a = scenario::service_curve_table(s, 1).str();
    CHECK(a == scenario::service_curve_table(s, 2).str());
    CHECK(a.rfind("t_ms,d_ms,w_Mb,eps,curve_Mb,theta_opt_per_bit,family,feasible", 0) == 0);
}

TEST_CASE("canned figures") {
    for (const auto& name : scenario::figure_names()) {
        const auto path = std::filesystem::path(WFC_SOURCE_DIR) / "configs" / (name + ".conf");
        CHECK(std::string(scenario::figure_config(name)) == slurp(path));
        for (const auto& sec : config::parse(std::string(scenario::figure_config(name)), name))
            CHECK_NOTHROW(scenario::resolve(sec, scenario::figure_command(name)));
    }
    CHECK_THROWS(scenario::figure_config("fig9"));
    CHECK_THROWS(scenario::parse_command("plot"));
}

TEST_CASE("curves are non-decreasing and the quantile columns are set") {
    const auto sections = config::parse(std::string(scenario::figure_config("fig4")), "fig4");
    const auto s = scenario::resolve(sections.at(0), scenario::Command::ServiceCurve);
    const auto table = scenario::service_curve_table(s, 1);
    const auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(table.header.begin(), table.header.end(), name) - table.header.begin());
    };
    const std::size_t d = col("d_ms"), curve = col("curve_Mb"), lower = col("apriori_lower_Mb");
    double previous = -1.0;
    std::string previous_d;
    for (const auto& row : table.rows) {
        const double v = std::stod(row[curve]);
        if (row[d] == previous_d) CHECK(v >= previous - 1e-12);
        if (row[d] == "1") CHECK(v == doctest::Approx(std::stod(row[lower])).epsilon(1e-9));
        previous = v;
        previous_d = row[d];
    }
}
