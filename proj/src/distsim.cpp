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

#include "anytime/distsim.hpp"

namespace anytime {

std::vector<ProcessorConfig> equal_shares(std::size_t K, std::size_t count)
{
    if (count == 0 || K < count)
        throw std::invalid_argument("equal_shares: need 1 <= processors <= particles");
    std::vector<ProcessorConfig> out(count);
    for (std::size_t p = 0; p < count; ++p)
        out[p].share = K / count + (p < K % count ? 1 : 0);
    return out;
}

}  // namespace anytime
