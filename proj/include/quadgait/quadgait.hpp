#pragma once

#include "quadgait/math.hpp"
#include "quadgait/skeleton.hpp"
#include "quadgait/gait.hpp"
#include "quadgait/ik.hpp"
#include "quadgait/motion.hpp"
#include "quadgait/layer.hpp"
#include "quadgait/clip.hpp"
#include "quadgait/bvh.hpp"
#include "quadgait/serialize.hpp"
#include "quadgait/service.hpp"
