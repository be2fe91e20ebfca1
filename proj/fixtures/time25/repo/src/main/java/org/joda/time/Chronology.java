package org.joda.time;

public abstract class Chronology {

    public abstract DateTimeZone getZone();

    public abstract Chronology withZone(DateTimeZone zone);

    public abstract long getDateTimeMillis(int year, int monthOfYear, int dayOfMonth,
            int hourOfDay, int minuteOfHour, int secondOfMinute, int millisOfSecond);
}
