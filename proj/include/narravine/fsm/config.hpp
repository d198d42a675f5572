#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"

namespace narravine::fsm {

// What the robot says at fixed protocol points. Defaults are placeholders;
// deployments edit them in the session config.
struct SpeechTemplates {
  std::string welcome = "Hello! I am iCub. Let me see who is playing with me today.";
  std::string participant_retry = "Could you look at me for a moment?";
  std::string briefing =
      "We are going to invent a short story together, using the cubes in front of you. "
      "Please choose a cube and hand it to me.";
  std::string next_trial = "Let's invent a new story! Please choose a cube and hand it to me.";
  std::string invite_human = "Now it is your turn: choose a second cube and continue the story.";
  std::string request_middle_cube = "Please pass me your cube, I want to see it.";
  std::string request_final_cube =
      "Now choose the last cube and pass it to me, so I can finish the story.";
  std::string reprompt = "I could not hear you. Could you tell me your part of the story again?";
  std::string cube_retry = "Oops! Let's try again. Please hand me the cube once more.";
  std::string apology = "Sorry, something went wrong with this story. Let's move on.";
  std::string farewell = "Thank you for playing with me! That was so much fun. Goodbye!";
  std::vector<std::string> feedback{"Great idea!", "What a wonderful twist!", "I love it!",
                                    "Very creative, well done!", "Fantastic, I like this part!"};
};

struct FsmConfig {
  int trials_total = 3;
  int max_retries = 2;  // per failure kind, per trial
  std::uint64_t seed = 7;
  SpeechTemplates templates;
};

void from_json(const Json& j, SpeechTemplates& t);
void to_json(Json& j, const SpeechTemplates& t);

}  // namespace narravine::fsm
