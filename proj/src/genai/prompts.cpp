#include "narravine/genai/prompts.hpp"

#include "narravine/common/hash.hpp"

namespace narravine::genai {

const std::string_view kDescriberPrompt =
    "You will cooperate with a narrative LLM to create a story. You will be provided"
    " with a small cardboard box with a sticker on it. The sticker can depict various"
    " scenarios/animals/object/characters. You are a describer that will be asked to"
    " recognize what is inside the sticker with a cartoon. Do not invent, be"
    " conservative. You have to be very confident in your answer. Do not be too much"
    " wordy, provide short descriptions. As much brief as possible, You must use"
    " maximum 10 words. What is inside the sticker? Tell only which character/object"
    " you see in the sticker, using only 2 adjectiives, without using the word"
    " 'sticker'. E.g. A grey smiling koala or a mushroom house with red roof.";

const std::string_view kNarratorPrompt =
    "You are a humanoid robot called iCub, developped at the Italian Institute of"
    " Technology. iCub can emulate many of a 6-8 years-old human capacities."
    " Manipulation, vision, and hearing are its main capacities. You will be asked to"
    " invent a story for a 6-8 years-old child. To do this, you will be asked to"
    " invent short pieces of a simple complete story in three steps, starting from"
    " the description of a scenario. Avoid using words like cartoon, cardbox or"
    " sticker. Please, remember to be short- maximum 15 words- and simple, and to"
    " create a homogeneous story that ends in 3 steps.";

const std::string_view kDescriberPromptSha256 =
    "9d7255d0be0d4d25b53d0cb624f1609fff5f798e9f4c16f4356e87799a9d927c";
const std::string_view kNarratorPromptSha256 =
    "b1ae1248273658bbf317ee9845ed70c5fbac89a08e50d4c3f8a8e544969144a2";

void to_json(Json& j, const PromptConfig& c) {
  j = Json{{"describer_system_prompt", c.describer_system_prompt},
           {"narrator_system_prompt", c.narrator_system_prompt},
           {"model_name", c.model_name},
           {"describer_temperature", c.describer_temperature},
           {"narrator_temperature", c.narrator_temperature},
           {"max_retries", c.max_retries},
           {"deadline_ms", c.deadline_ms},
           {"vlm_input", c.vlm_input}};
}

void from_json(const Json& j, PromptConfig& c) {
  const PromptConfig d;
  c.describer_system_prompt = j.value("describer_system_prompt", d.describer_system_prompt);
  c.narrator_system_prompt = j.value("narrator_system_prompt", d.narrator_system_prompt);
  c.model_name = j.value("model_name", d.model_name);
  c.describer_temperature = j.value("describer_temperature", d.describer_temperature);
  c.narrator_temperature = j.value("narrator_temperature", d.narrator_temperature);
  c.max_retries = j.value("max_retries", d.max_retries);
  c.deadline_ms = j.value("deadline_ms", d.deadline_ms);
  c.vlm_input = j.value("vlm_input", d.vlm_input);
}

Json prompt_fidelity(const PromptConfig& c) {
  auto entry = [](const std::string& prompt, std::string_view expected) {
    const auto h = sha256_hex(prompt);
    return Json{{"sha256", h}, {"verbatim", h == expected}};
  };
  return Json{{"describer", entry(c.describer_system_prompt, kDescriberPromptSha256)},
               {"narrator", entry(c.narrator_system_prompt, kNarratorPromptSha256)}};
}

bool prompts_verbatim(const PromptConfig& c) {
  const auto f = prompt_fidelity(c);
  return f["describer"]["verbatim"].get<bool>() && f["narrator"]["verbatim"].get<bool>();
}

}  // namespace narravine::genai
