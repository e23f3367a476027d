#pragma once

#include "acceptance.hpp"
#include "defaults.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "fieldzoo.hpp"
#include "gv.hpp"
#include "linkref.hpp"
#include "spectral.hpp"
#include "trig_series.hpp"
#include "wrg1.hpp"
