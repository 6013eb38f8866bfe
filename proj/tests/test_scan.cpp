#include <doctest.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcorr/error.hpp"
#include "abcorr/scan.hpp"
#include "abcorr/validation.hpp"

using abcorr::Quantity;
using abcorr::ScanSettings;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::vector<double>> parse_rows(const std::string& csv, std::string* header = nullptr) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(csv);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.rfind("# meta:", 0) == 0) {
            continue;
        }
        if (!seen_header) {
            seen_header = true;
            if (header != nullptr) {
                *header = line;
            }
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto comma = line.find(',', start);
            const auto end = comma == std::string::npos ? line.size() : comma;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
            REQUIRE(ec == std::errc{});
            REQUIRE(ptr == line.data() + end);
            row.push_back(v);
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

ScanSettings settings_with(double q, double time, int grid_n = 41) {
    ScanSettings s;
    s.mode_a = abcorr::ModeParams::from_q(abcorr::kDefaultOmega1, q);
    s.mode_b = abcorr::ModeParams::from_q(abcorr::kDefaultOmega2, q);
    s.time = time;
    s.grid_n = grid_n;
    return s;
}

}  // namespace

TEST_CASE("angle parsing") {
    CHECK(abcorr::parse_angle("0.5") == 0.5);
    CHECK(abcorr::parse_angle("pi") == kPi);
    CHECK(abcorr::parse_angle("-pi") == -kPi);
    CHECK(abcorr::parse_angle("+2pi") == 2.0 * kPi);
    CHECK(abcorr::parse_angle("-1.1pi") == -1.1 * kPi);
    CHECK(abcorr::parse_angle(" 0.98pi ") == 0.98 * kPi);
    CHECK(abcorr::parse_angle("1e3") == 1000.0);
    for (const char* bad : {"", "abc", "1.2.3pi", "pipi", "nan", "inf"}) {
        CHECK_THROWS_AS(abcorr::parse_angle(bad), abcorr::InvalidArgument);
    }
}

TEST_CASE("dims parsing") {
    CHECK(abcorr::parse_dims("16,32,64") == std::vector<abcorr::Index>{16, 32, 64});
    CHECK(abcorr::parse_dims("8") == std::vector<abcorr::Index>{8});
    for (const char* bad : {"", "1", "16,,32", "x", "16,-2"}) {
        CHECK_THROWS_AS(abcorr::parse_dims(bad), abcorr::InvalidArgument);
    }
}

TEST_CASE("quantity names round trip") {
    for (Quantity q : {Quantity::i_sep, Quantity::r_sep, Quantity::r_ent, Quantity::i_ent,
                       Quantity::i_numeric, Quantity::r_numeric}) {
        CHECK(abcorr::parse_quantity(abcorr::to_string(q)) == q);
    }
    CHECK_THROWS_AS(abcorr::parse_quantity("r_sep"), abcorr::InvalidArgument);
}

TEST_CASE("half period") {
    ScanSettings s;
    CHECK(abcorr::half_period_time(s) == doctest::Approx(kPi / 2e-5));
    s.mode_b = s.mode_a;
    CHECK(abcorr::half_period_time(s) == 0.0);
}

TEST_CASE("real formatting round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.0 * kPi, 1e-300, 6.02214076e23, 0.0}) {
        const std::string text = abcorr::format_real(v);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        CHECK(back == v);
    }
}

TEST_CASE("separable ratio grid is time independent") {
    const auto g0 = abcorr::compute_grid(Quantity::r_sep, settings_with(0.5, 0.0));
    const auto g1 = abcorr::compute_grid(Quantity::r_sep, settings_with(0.5, 98765.4));
    CHECK(g0.values == g1.values);
    CHECK(g0.axis_a.size() == 41);
    CHECK(g0.values.size() == 41 * 41);
}

TEST_CASE("equal frequencies make the entangled offset time independent") {
    auto s = settings_with(0.5, 0.0, 21);
    s.mode_a.omega = s.mode_b.omega;
    const auto sep = abcorr::compute_grid(Quantity::r_sep, s);
    const auto e0 = abcorr::compute_grid(Quantity::r_ent, s);
    s.time = 4.2e5;
    const auto e1 = abcorr::compute_grid(Quantity::r_ent, s);
    double largest = 0.0;
    for (std::size_t i = 0; i < sep.values.size(); ++i) {
        const double d0 = e0.values[i] - sep.values[i];
        const double d1 = e1.values[i] - sep.values[i];
        CHECK(d0 == doctest::Approx(d1).epsilon(1e-12));
        largest = std::max(largest, std::abs(d0));
    }
    CHECK(largest > 1e-2);
}

TEST_CASE("numeric grids") {
    auto s = settings_with(0.6, 1234.0, 13);
    s.dim = 12;
    SUBCASE("product state ratio is one") {
        s.state = "product";
        const auto g = abcorr::compute_grid(Quantity::r_numeric, s);
        for (double v : g.values) {
            CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("numeric intensity matches the closed form") {
        s.state = "ent";
        const auto numeric = abcorr::compute_grid(Quantity::i_numeric, s);
        const auto closed = abcorr::compute_grid(Quantity::i_ent, s);
        for (std::size_t i = 0; i < numeric.values.size(); ++i) {
            CHECK(std::abs(numeric.values[i] - closed.values[i]) < 1e-10);
        }
        std::string dims;
        for (const auto& [k, v] : numeric.meta) {
            if (k == "dim") dims = v;
        }
        CHECK(dims == "12x12");
    }
    SUBCASE("missing state file") {
        s.state = "/nonexistent/state.json";
        CHECK_THROWS_AS(abcorr::compute_grid(Quantity::r_numeric, s), abcorr::ValidationError);
    }
}

TEST_CASE("grid CSV is identical across thread counts") {
    auto s = settings_with(0.5, 1.5e5, 31);
    s.state = "ent";
    s.dim = 8;
    for (Quantity q : {Quantity::r_ent, Quantity::r_numeric}) {
        s.threads = 1;
        const std::string one = abcorr::to_csv(abcorr::compute_grid(q, s));
        s.threads = 7;
        const std::string many = abcorr::to_csv(abcorr::compute_grid(q, s));
        CHECK(one == many);
    }
}

TEST_CASE("grid CSV layout") {
    const auto g = abcorr::compute_grid(Quantity::i_sep, settings_with(0.5, 0.0, 5));
    const std::string csv = abcorr::to_csv(g);
    CHECK(csv.rfind("# meta: quantity=i-sep\n", 0) == 0);
    std::string header;
    const auto rows = parse_rows(csv, &header);
    CHECK(header == "sigma_a,sigma_b,value");
    REQUIRE(rows.size() == 25);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i][0] == g.axis_a[i / 5]);
        CHECK(rows[i][1] == g.axis_b[i % 5]);
        CHECK(rows[i][2] == g.values[i]);
    }
}

TEST_CASE("slice") {
    auto s = settings_with(0.5, abcorr::half_period_time(ScanSettings{}), 101);
    SUBCASE("defaults separate the curves where sin(sigma_a) != 0") {
        const auto slice = abcorr::compute_slice(s, -1.1 * kPi);
        for (std::size_t i = 0; i < slice.sigma_a.size(); ++i) {
            const double sa = slice.sigma_a[i];
            const bool multiple_of_pi = std::abs(std::sin(sa)) < 1e-12;
            if (multiple_of_pi) {
                CHECK(std::abs(slice.r_ent[i] - slice.r_sep[i]) < 1e-15);
            } else {
                CHECK(slice.r_ent[i] != doctest::Approx(slice.r_sep[i]).epsilon(1e-9));
            }
        }
        std::string header;
        CHECK(parse_rows(abcorr::to_csv(slice), &header).size() == 101);
        CHECK(header == "sigma_a,r_sep,r_ent");
    }
    SUBCASE("sigma_b = 0 gives equal columns") {
        const auto slice = abcorr::compute_slice(s, 0.0);
        CHECK(slice.r_ent == slice.r_sep);
    }
}

TEST_CASE("time series") {
    const auto s = settings_with(0.5, 0.0);
    const double beat = 2.0 * kPi / (abcorr::kDefaultOmega1 - abcorr::kDefaultOmega2);
    const auto ts = abcorr::compute_timeseries(s, 0.98 * kPi, -1.1 * kPi, 0.0, 2.0 * beat, 1024);
    REQUIRE(ts.times.size() == 1024);
    for (std::size_t k = 1; k < ts.times.size(); ++k) {
        CHECK(ts.times[k] > ts.times[k - 1]);
        CHECK(ts.r_sep[k] == ts.r_sep[0]);
    }
    CHECK(ts.times.front() == 0.0);
    CHECK(ts.times.back() < 2.0 * beat);

    double mean = 0.0;
    for (double v : ts.r_ent) mean += v;
    mean /= static_cast<double>(ts.r_ent.size());
    CHECK(mean == doctest::Approx(ts.r_sep[0]).epsilon(1e-12));
    CHECK(abcorr::spectral_fraction(ts.r_ent, 2) > 1.0 - 1e-10);

    // One beat period later the entangled ratio repeats.
    const auto shifted =
        abcorr::compute_timeseries(s, 0.98 * kPi, -1.1 * kPi, beat, 3.0 * beat, 1024);
    for (std::size_t k = 0; k < 512; ++k) {
        CHECK(shifted.r_ent[k] == doctest::Approx(ts.r_ent[k + 512]).epsilon(1e-9));
    }

    CHECK_THROWS_AS(abcorr::compute_timeseries(s, 0.0, 0.0, 1.0, 1.0, 16), abcorr::InvalidArgument);
    CHECK_THROWS_AS(abcorr::compute_timeseries(s, 0.0, 0.0, 0.0, 1.0, 1), abcorr::InvalidArgument);
}

TEST_CASE("spectral fraction of a pure tone") {
    std::vector<double> tone(256);
    for (std::size_t k = 0; k < tone.size(); ++k) {
        tone[k] = 2.0 + std::cos(2.0 * kPi * 5.0 * static_cast<double>(k) / 256.0);
    }
    CHECK(abcorr::spectral_fraction(tone, 5) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(abcorr::spectral_fraction(tone, 6) < 0.9);
}

TEST_CASE("parallel_for") {
    std::vector<int> out(100, 0);
    abcorr::parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] == static_cast<int>(i) * 2);
    }
    try {
        abcorr::parallel_for(50, 3, [](std::size_t i) {
            if (i == 17 || i == 40) {
                throw std::runtime_error("boom " + std::to_string(i));
            }
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "boom 17");
    }
}

TEST_CASE("validation suite") {
    abcorr::ValidateOptions clean;
    clean.dims = {16, 32};
    const auto results = abcorr::run_validation(clean);
    CHECK(results.size() >= 15);
    for (const auto& r : results) {
        if (r.name.find("R_sep between") != std::string::npos) {
            // The separable ratio rises above its (0, 0) value at (0, pi).
            CHECK_MESSAGE(!r.passed, r.name);
        } else {
            CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);
        }
    }

    abcorr::ValidateOptions perturbed = clean;
    perturbed.perturb = true;
    bool flagged = false;
    for (const auto& r : abcorr::run_validation(perturbed)) {
        if (r.name.find("closed forms") != std::string::npos) {
            flagged = !r.passed && r.residual > 1e-3;
        }
    }
    CHECK(flagged);
    CHECK(abcorr::format_report(results).find("checks passed") != std::string::npos);
}
