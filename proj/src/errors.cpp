#include "generacci/errors.hpp"

namespace generacci {

const char* errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::table_too_short: return "table-too-short";
        case Errc::no_convergence: return "no-convergence";
        case Errc::pattern_not_found: return "pattern-not-found";
        case Errc::invalid_system: return "invalid-system";
        case Errc::not_legal: return "not-legal";
        case Errc::no_s_block: return "no-s-block";
        case Errc::n_too_small: return "n-too-small";
        case Errc::out_of_range: return "out-of-range";
        case Errc::insufficient_data: return "insufficient-data";
        case Errc::degenerate_distribution: return "degenerate-distribution";
        case Errc::empty_distribution: return "empty-distribution";
    }
    return "error";
}

}  // namespace generacci
