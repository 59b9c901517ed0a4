namespace thermolim {}
