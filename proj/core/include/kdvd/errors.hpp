#pragma once

#include <stdexcept>
#include <string>

namespace kdvd {

/// Malformed or out-of-range configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Query into a history line before its first stored sample.
struct HistoryUnderrun : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear solve breakdown (singular factorization).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Picard iteration failed to contract within the iteration budget.
struct NonlinearDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gains or (mu1, mu2) outside the certifiable set.
struct InadmissibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Decay certification refused (L outside the Kato range).
struct CertificationRefused : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a closed-form function.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kdvd
