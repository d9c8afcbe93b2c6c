#pragma once

#include <stdexcept>
#include <string>

namespace generacci {

enum class Errc {
    table_too_short,
    no_convergence,
    pattern_not_found,
    invalid_system,
    not_legal,
    no_s_block,
    n_too_small,
    out_of_range,
    insufficient_data,
    degenerate_distribution,
    empty_distribution,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace generacci
