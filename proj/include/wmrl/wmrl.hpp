#ifndef WMRL_WMRL_HPP
#define WMRL_WMRL_HPP

#include "wmrl/core.hpp"
#include "wmrl/task_env.hpp"
#include "wmrl/qlearning.hpp"
#include "wmrl/working_memory.hpp"
#include "wmrl/dual_control.hpp"
#include "wmrl/params.hpp"
#include "wmrl/agent.hpp"
#include "wmrl/representative.hpp"
#include "wmrl/replay.hpp"
#include "wmrl/dataset.hpp"
#include "wmrl/nsga2.hpp"
#include "wmrl/fitting.hpp"
#include "wmrl/session_io.hpp"

#endif  // WMRL_WMRL_HPP
