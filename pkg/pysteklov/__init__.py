import matplotlib
import os

# must be before importing matplotlib.pyplot or pylab!
if os.name == 'posix' and "DISPLAY" not in os.environ:
    matplotlib.use('Agg')


""" We import almost everything by default, in the general
namespace because it is simpler for everyone """

from pysteklov.errors import *
from pysteklov.geometry import *
from pysteklov.reference import *
from pysteklov.dtn import *
from pysteklov.extension import *
from pysteklov.fbi import *
from pysteklov.decay import *
from pysteklov.logger import *
from pysteklov.results import *
from pysteklov.config import *
from pysteklov.experiment import *


__version__ = "1.0.0"
__author__ = "PySteklov developers"
