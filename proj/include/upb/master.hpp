#pragma once

// Open-system dynamics in a truncated Fock space.
#include "upb/fock.hpp"
#include "upb/jackknife.hpp"
#include "upb/liouvillian.hpp"
#include "upb/trajectory.hpp"
