#pragma once

#include <cstddef>
#include <string>

namespace metacombine {

// A p-value (or tail probability) known either exactly or as a hard bracket.
struct PValueInterval {
    double lower = 0.0;
    double upper = 1.0;
    bool exact = false;
};

struct RealInterval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
};

enum class TestFamily { Fisher, Stouffer, Lrt, GaussianSquare, TLrt };
enum class Side { Left, Right, Undirected, Concordant };

// One of the combination tests: Q^{L,R,U,C}, S^{L,R,U,C}, lambda^{L,R,C},
// Z^U (GaussianSquare/Undirected) and T^R (TLrt/Right).
struct TestMethod {
    TestFamily family = TestFamily::Fisher;
    Side side = Side::Undirected;

    bool operator==(const TestMethod&) const = default;
};

// Valid combinations: Fisher and Stouffer support all four sides, Lrt
// supports left/right/concordant, GaussianSquare only undirected, TLrt
// only right.
bool is_valid(TestMethod method);

std::string method_name(TestMethod method);
std::string family_name(TestFamily family);
std::string side_name(Side side);

}  // namespace metacombine
