__version__ = "1.0.0"

AF = "AF"
DF = "DF"

PROTOCOLS = (AF, DF)
