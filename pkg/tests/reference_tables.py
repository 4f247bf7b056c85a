"""Reference detection-function tables for a=1/3, b=1/2.

Rows are (h, cu, cv). Tables 1, 3 and 4 are stored in units of 1e4.
"""

TABLE2 = [
    (0.01, -0.001875, -0.001876), (0.11, -0.020732, -0.02083),
    (0.21, -0.039766, -0.0401393), (0.31, -0.058969, -0.059813),
    (0.41, -0.078305, -0.079837), (0.51, -0.097701, -0.10015),
    (0.61, -0.117021, -0.120612), (0.71, -0.136046, -0.140967),
    (0.81, -0.154444, -0.160774), (0.91, -0.171734, -0.179321),
    (1.01, -0.187236, -0.195488), (1.11, -0.200019, -0.207541),
    (1.21, -0.208827, -0.212808), (1.31, -0.211988, -0.207141),
    (1.41, -0.207302, -0.184002), (1.51, -0.19189, -0.132774),
    (1.61, -0.162016, -0.0354102), (1.71, -0.11285, 0.141107),
    (1.81, -0.038213, 0.465149), (1.91, 0.069632, 1.1178),
]

# six rows each: both ends plus interior rows (extrema where the table has one)
TABLE1 = [(-2.0, 4.933, 1.373), (-1.0, 4.249, 1.173), (0.0, 3.618, 0.9906),
          (1.0, 3.044, 0.8259), (1.5, 2.783, 0.7514), (2.0, 2.553, 0.6859)]
TABLE3 = [(2.0, 3.0408, 0.8167), (2.06, 3.0463, 0.8177), (2.3, 3.0303, 0.8116),
          (2.6, 2.9986, 0.8014), (2.86, 2.9826, 0.7959), (3.0, 2.9973, 0.7995)]
TABLE4 = [(3.0, 2.9973, 0.7995), (3.16, 3.0149, 0.8037), (4.0, 2.9165, 0.7719),
          (5.0, 2.6808, 0.7005), (7.0, 2.0440, 0.5122), (8.2, 1.6041, 0.3842)]

# reference band edges for the cases with 4, 5, 9, 11, 13 and 9 cycles
REFERENCE_EDGES = [176.22, 242.6, 286.76, 288.49, 288.92, 289.99, 290.82]
