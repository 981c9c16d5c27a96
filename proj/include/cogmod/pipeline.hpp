#pragma once

#include "cogmod/pipeline/candidates.hpp"
#include "cogmod/pipeline/config.hpp"
#include "cogmod/pipeline/engine.hpp"
#include "cogmod/pipeline/prompt.hpp"
#include "cogmod/pipeline/run.hpp"
