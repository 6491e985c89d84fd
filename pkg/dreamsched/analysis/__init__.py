"""
Layer profiles, the closed-form cost model and the schedule searches.

Modules
   profile    : per-layer timing profiles and their text format
   cost       : schedules and the period objective
   scheduler  : pruned DFS, brute-force oracle and bubble filling
   bench      : DFS vs brute-force scaling table
"""
