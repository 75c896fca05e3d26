#include "metacombine/types.hpp"

namespace metacombine {

bool is_valid(TestMethod method) {
    switch (method.family) {
        case TestFamily::Fisher:
        case TestFamily::Stouffer:
            return true;
        case TestFamily::Lrt:
            return method.side != Side::Undirected;
        case TestFamily::GaussianSquare:
            return method.side == Side::Undirected;
        case TestFamily::TLrt:
            return method.side == Side::Right;
    }
    return false;
}

std::string family_name(TestFamily family) {
    switch (family) {
        case TestFamily::Fisher: return "fisher";
        case TestFamily::Stouffer: return "stouffer";
        case TestFamily::Lrt: return "lrt";
        case TestFamily::GaussianSquare: return "zu";
        case TestFamily::TLrt: return "tlrt";
    }
    return "?";
}

std::string side_name(Side side) {
    switch (side) {
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::Undirected: return "undirected";
        case Side::Concordant: return "concordant";
    }
    return "?";
}

std::string method_name(TestMethod method) {
    if (method.family == TestFamily::GaussianSquare) return "zu";
    if (method.family == TestFamily::TLrt) return "tlrt";
    return family_name(method.family) + ":" + side_name(method.side);
}

}  // namespace metacombine
