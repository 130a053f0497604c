/*
   Copyright 2026 The Anytime SMC Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <type_traits>

namespace anytime {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t tag_hash(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t tag_hash(std::uint64_t v) { return v; }

}  // namespace detail

/// Counter-based random stream. Output i is a bijective mix of (key, i), so a
/// stream is fully described by its key and position and streams with
/// different keys never share generator state. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream() = default;
    explicit Stream(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter)
    {
    }

    /// Named sub-stream: `Stream::derive(seed, "move", v, k)`.
    template <class... Tags>
    static Stream derive(std::uint64_t seed, const Tags&... tags)
    {
        std::uint64_t key = detail::mix64(seed ^ 0x5851f42d4c957f2dULL);
        ((key = detail::mix64(key ^ detail::mix64(hash_one(tags) + detail::kGolden))), ...);
        return Stream(key);
    }

    result_type operator()()
    {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGolden);
    }

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    friend bool operator==(const Stream&, const Stream&) = default;

private:
    template <class T>
    static std::uint64_t hash_one(const T& t)
    {
        if constexpr (std::is_integral_v<T>)
            return detail::tag_hash(static_cast<std::uint64_t>(t));
        else
            return detail::tag_hash(std::string_view(t));
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace anytime
