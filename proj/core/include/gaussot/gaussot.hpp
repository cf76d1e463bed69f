#pragma once

#include "gaussot/barycenter.hpp"
#include "gaussot/correlation.hpp"
#include "gaussot/error.hpp"
#include "gaussot/oracle.hpp"
#include "gaussot/random.hpp"
#include "gaussot/symmat.hpp"
#include "gaussot/transport.hpp"
