#pragma once

#include <string>
#include <string_view>

namespace gridgram {

// SHA-256 of the bytes, lower-case hex (64 characters).
std::string sha256_hex(std::string_view data);

}  // namespace gridgram
