#pragma once

#include <string>
#include <string_view>

namespace vexp {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// Streaming variant; corpus digests feed each document's id, lang tag and
// raw text through this so the digest pins content, not file framing.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view bytes);
    std::string hex(); // finalizes; object must not be reused

private:
    void* ctx_;
};

} // namespace vexp
