#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ndschaos {

// Exit-code classes used by the command-line driver.
enum class error_class { hypothesis = 1, config = 2, numeric = 3 };

class error : public std::runtime_error {
public:
    error(error_class cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
    [[nodiscard]] error_class classification() const noexcept { return class_; }

private:
    error_class class_;
};

class invalid_transition_matrix : public error {
public:
    enum class reason { size_too_small, non_binary_entry, zero_row, zero_column };

    invalid_transition_matrix(reason r, std::size_t row, std::size_t col)
        : error(error_class::config, describe(r, row, col)), reason_(r), row_(row), col_(col) {}

    [[nodiscard]] reason why() const noexcept { return reason_; }
    // 1-based, matching symbol numbering.
    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t column() const noexcept { return col_; }

private:
    static std::string describe(reason r, std::size_t row, std::size_t col)
    {
        switch (r) {
        case reason::size_too_small: return "transition matrix must be at least 2x2";
        case reason::non_binary_entry:
            return "non-binary entry at (" + std::to_string(row) + "," + std::to_string(col) + ")";
        case reason::zero_row: return "row " + std::to_string(row) + " has no nonzero entry";
        case reason::zero_column: return "column " + std::to_string(col) + " has no nonzero entry";
        }
        return "invalid transition matrix";
    }

    reason reason_;
    std::size_t row_;
    std::size_t col_;
};

class hypotheses_not_met : public error {
public:
    explicit hypotheses_not_met(const std::string& what) : error(error_class::hypothesis, what) {}
};

class not_allowable : public error {
public:
    explicit not_allowable(std::size_t position)
        : error(error_class::hypothesis,
                "word is not allowable: forbidden transition after position " + std::to_string(position)),
          position_(position) {}
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class selector_exhausted : public error {
public:
    selector_exhausted(std::size_t have, std::size_t need)
        : error(error_class::config, "selector has " + std::to_string(have) + " bits, " + std::to_string(need) +
                                         " required") {}
};

class schedule_inconsistent : public error {
public:
    explicit schedule_inconsistent(const std::string& what) : error(error_class::numeric, what) {}
};

class parameter_out_of_range : public error {
public:
    explicit parameter_out_of_range(const std::string& what) : error(error_class::config, what) {}
};

class not_increasing : public error {
public:
    explicit not_increasing(const std::string& what) : error(error_class::config, what) {}
};

class overflow_guard : public error {
public:
    overflow_guard(std::size_t index, double value)
        : error(error_class::numeric, "orbit diverged at step " + std::to_string(index) + " (|x| = " +
                                          std::to_string(value) + ")"),
          index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class tolerance_unreachable : public error {
public:
    explicit tolerance_unreachable(const std::string& what) : error(error_class::numeric, what) {}
};

class separation_violated : public error {
public:
    separation_violated(std::size_t i, std::size_t j, std::size_t n)
        : error(error_class::hypothesis, "sets " + std::to_string(i) + " and " + std::to_string(j) +
                                             " have overlapping interiors at index " + std::to_string(n)),
          i_(i), j_(j), n_(n) {}
    [[nodiscard]] std::size_t first() const noexcept { return i_; }
    [[nodiscard]] std::size_t second() const noexcept { return j_; }
    [[nodiscard]] std::size_t index() const noexcept { return n_; }

private:
    std::size_t i_, j_, n_;
};

class loop_missing : public error {
public:
    explicit loop_missing(std::size_t symbol)
        : error(error_class::hypothesis, "symbol " + std::to_string(symbol) + " has no self-transition") {}
};

class empty_cylinder : public error {
public:
    explicit empty_cylinder(std::size_t depth)
        : error(error_class::numeric, "cylinder is empty at depth " + std::to_string(depth)), depth_(depth) {}
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }

private:
    std::size_t depth_;
};

class horizon_mismatch : public error {
public:
    horizon_mismatch(std::size_t a, std::size_t b)
        : error(error_class::numeric,
                "trace horizons differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class empty_checkpoint_set : public error {
public:
    empty_checkpoint_set() : error(error_class::numeric, "checkpoint set is empty") {}
};

class config_error : public error {
public:
    config_error(const std::string& location, const std::string& what)
        : error(error_class::config, location.empty() ? what : location + ": " + what), location_(location) {}
    [[nodiscard]] const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

} // namespace ndschaos
