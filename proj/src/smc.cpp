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

#include "anytime/smc.hpp"

namespace anytime {

MoveKind parse_move_kind(std::string_view name)
{
    if (name == "fixed")
        return MoveKind::fixed;
    if (name == "anytime")
        return MoveKind::anytime;
    throw std::invalid_argument("unknown move mode: " + std::string(name));
}

std::string to_string(MoveKind kind) { return kind == MoveKind::fixed ? "fixed" : "anytime"; }

ExtraPolicy parse_extra_policy(std::string_view name)
{
    if (name == "fresh")
        return ExtraPolicy::fresh;
    if (name == "resume")
        return ExtraPolicy::resume;
    throw std::invalid_argument("unknown extra-particle policy: " + std::string(name));
}

std::string to_string(ExtraPolicy policy) { return policy == ExtraPolicy::fresh ? "fresh" : "resume"; }

}  // namespace anytime
