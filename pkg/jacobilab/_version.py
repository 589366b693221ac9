__author__ = "The jacobilab developers"
__copyright__ = "2026, The jacobilab developers"
__email__ = "jacobilab@users.noreply.github.com"
__license__ = "GPL3"
__title__ = "jacobilab"
__version__ = "0.1.0"
