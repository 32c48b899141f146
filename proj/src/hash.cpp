#include "autoeval/hash.hpp"

#include <cstdio>
#include <fstream>

#include "autoeval/errors.hpp"

namespace autoeval {

std::string hash_to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kFormat, "cannot open for hashing: " + path);
    Fnv1a64 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.digest();
}

}  // namespace autoeval
