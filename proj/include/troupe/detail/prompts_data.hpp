#pragma once

// Implemented by the build-generated prompts_data.cpp; each function returns
// the exact bytes of the corresponding file under assets/prompts.

namespace troupe::detail {

const char* head_prompt_bytes();
const char* role_implicit_visual_bytes();
const char* role_explicit_3d_bytes();
const char* role_scene_graph_bytes();
const char* reasoning_prompt_bytes();

} // namespace troupe::detail
