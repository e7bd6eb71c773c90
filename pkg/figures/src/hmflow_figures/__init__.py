"""Figure scripts for the flow pipeline's CSV outputs.

The three entry points read the flat tables written by the ``simulate``
and ``analyze`` steps and render static images.  Nothing in this
package imports the solver; the CSV files are the whole interface, and
every number that ends up on a figure is taken from them.
"""

__version__ = "0.1.0"
