#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "tilediff/grid.hpp"

namespace tilediff {

// Linear stand-in for a VAE: maps between pixel space and latent space.
struct Codec {
    enum class Kind { identity, boxpool };

    Kind kind = Kind::identity;
    std::size_t factor = 1;

    static Codec identity() { return {Kind::identity, 1}; }
    static Codec boxpool(std::size_t factor = 2);

    friend bool operator==(const Codec&, const Codec&) = default;
};

std::string_view to_string(Codec::Kind kind);
Codec::Kind parse_codec_kind(std::string_view name);

// identity: copy. boxpool: factor x factor block mean per channel.
Grid encode(const Codec& codec, const Grid& pixel);

// identity: copy. boxpool: bilinear upsample by factor.
Grid decode(const Codec& codec, const Grid& latent);

} // namespace tilediff
