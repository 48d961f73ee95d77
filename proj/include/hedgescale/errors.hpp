#pragma once

#include <stdexcept>
#include <string>

namespace hedgescale {

/// Error categories surfaced by the library. Each operation documents which
/// codes it can raise; callers may branch on code() instead of parsing text.
enum class Errc {
    missing_file,
    parse_error,
    non_positive_price,
    duplicate_date,
    too_short,
    empty_intersection,
    split_out_of_range,
    singular_regression,
    degenerate_variance,
    invalid_params,
    degenerate_data,
    non_pd_matrix,
    no_real_root,
    invalid_kappa,
    too_short_for_tail,
    zero_baseline_risk,
    too_few_blocks,
    no_preceding_base_date,
    date_mismatch,
    invalid_config,
    io_error,
};

[[nodiscard]] constexpr const char* errc_name(Errc c) {
    switch (c) {
        case Errc::missing_file: return "MissingFile";
        case Errc::parse_error: return "ParseError";
        case Errc::non_positive_price: return "NonPositivePrice";
        case Errc::duplicate_date: return "DuplicateDate";
        case Errc::too_short: return "TooShort";
        case Errc::empty_intersection: return "EmptyIntersection";
        case Errc::split_out_of_range: return "SplitOutOfRange";
        case Errc::singular_regression: return "SingularRegression";
        case Errc::degenerate_variance: return "DegenerateVariance";
        case Errc::invalid_params: return "InvalidParams";
        case Errc::degenerate_data: return "DegenerateData";
        case Errc::non_pd_matrix: return "NonPDMatrix";
        case Errc::no_real_root: return "NoRealRoot";
        case Errc::invalid_kappa: return "InvalidKappa";
        case Errc::too_short_for_tail: return "TooShortForTail";
        case Errc::zero_baseline_risk: return "ZeroBaselineRisk";
        case Errc::too_few_blocks: return "TooFewBlocks";
        case Errc::no_preceding_base_date: return "NoPrecedingBaseDate";
        case Errc::date_mismatch: return "DateMismatch";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace hedgescale
