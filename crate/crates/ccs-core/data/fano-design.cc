points=14
colors=8
0 2 2 2 2 2 2 4 4 4 6 6 6 6
2 0 2 2 2 2 2 4 6 6 4 4 6 6
2 2 0 2 2 2 2 4 6 6 6 6 4 4
2 2 2 0 2 2 2 6 4 6 4 6 4 6
2 2 2 2 0 2 2 6 4 6 6 4 6 4
2 2 2 2 2 0 2 6 6 4 4 6 6 4
2 2 2 2 2 2 0 6 6 4 6 4 4 6
5 5 5 7 7 7 7 1 3 3 3 3 3 3
5 7 7 5 5 7 7 3 1 3 3 3 3 3
5 7 7 7 7 5 5 3 3 1 3 3 3 3
7 5 7 5 7 5 7 3 3 3 1 3 3 3
7 5 7 7 5 7 5 3 3 3 3 1 3 3
7 7 5 5 7 7 5 3 3 3 3 3 1 3
7 7 5 7 5 5 7 3 3 3 3 3 3 1
