#include <fstream>
#include <sstream>

#include "doctest.h"
#include "detflow/shooting.hpp"

using namespace detflow;

// Paneitz admissible profile at eps_bar - 1e-6, every 40th grid point.
TEST_CASE("pinned admissible profile") {
    std::ifstream in(DETFLOW_TEST_DATA "/admissible_paneitz.csv");
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    const auto c = presets::paneitz();
    const auto bar = find_eps_bar(c, {0, 10}, 1e-10);
    const auto p = admissible_profile(c, bar.eps_bar - 1e-6);
    int rows = 0;
    for (std::size_t i = 0; std::getline(in, line); i += 40, ++rows) {
        std::stringstream ss(line);
        double t, x, u;
        char comma;
        ss >> t >> comma >> x >> comma >> u;
        REQUIRE(i < p.t.size());
        CHECK(p.t[i] == doctest::Approx(t).epsilon(1e-12));
        CHECK(p.states[i][0] == doctest::Approx(x).epsilon(1e-6));
        CHECK(p.states[i][3] == doctest::Approx(u).epsilon(1e-6));
    }
    CHECK(rows == 101);
}
