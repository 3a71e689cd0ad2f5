#pragma once

#include <stdexcept>
#include <string>

namespace finn {

/// A computed result failed a runtime integrity check (diverged loss,
/// artifact fingerprint mismatch, gradient check out of tolerance). The CLI
/// maps this to its own exit status, distinct from usage errors.
class VerificationError : public std::runtime_error {
public:
    explicit VerificationError(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace finn
