#include <pybind11/pybind11.h>

#include "metacombine/special_functions.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.doc() = "p-value combination tests and FFT-bracketed power bounds";
    m.def("norm_cdf", &metacombine::norm_cdf);
}
